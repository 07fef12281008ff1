use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zb_core::dynamics::{default_time_grid, pcm_trajectory_exact, wavepacket_trajectory, PacketGrid, WavePacket};
use zb_core::model::{chiral_ti_3d, kane_mele, maxwell_lattice, spin_j_continuum};
use zb_core::topology::{chern_plaquette_fixed, winding_numerical, z2_kane_mele, z2_wilson_loop};
use zb_core::{hermitian_eig, KaneMeleParams, Spin, Spinor};

fn eigensolver(c: &mut Criterion) {
    let mut g = c.benchmark_group("hermitian_eig");
    for two_j in [1u32, 2, 4, 7] {
        let model = spin_j_continuum(Spin::from_twice(two_j).unwrap(), 1.0, 0.7, 0.4);
        let h = model.evaluate(&[0.3, -0.8]).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(two_j + 1), &h, |b, h| b.iter(|| hermitian_eig(black_box(h))));
    }
    g.finish();
}

fn trajectories(c: &mut Criterion) {
    let model = maxwell_lattice(1.0, 1.0).unwrap();
    let spinor = Spinor::from_real(&[1.0, 1.0, 0.0]).unwrap();
    let times = default_time_grid(2.0);
    c.bench_function("pcm_exact_512", |b| {
        b.iter(|| pcm_trajectory_exact(&model, black_box(&[0.0, 0.0]), &spinor, &times, false).unwrap())
    });
    let packet = WavePacket::with_spinor(20.0, vec![0.0, 0.0], spinor.clone()).unwrap();
    c.bench_function("packet_41x41_512", |b| {
        b.iter(|| wavepacket_trajectory(&model, black_box(&packet), &PacketGrid::default(), &times).unwrap())
    });
}

fn invariants(c: &mut Criterion) {
    let mut g = c.benchmark_group("invariants");
    g.sample_size(10);
    let maxwell = maxwell_lattice(1.0, 1.0).unwrap();
    g.bench_function("chern_plaquette_64", |b| b.iter(|| chern_plaquette_fixed(black_box(&maxwell), 0..1, 64).unwrap()));
    let chiral = chiral_ti_3d(2.0);
    g.bench_function("winding_40", |b| b.iter(|| winding_numerical(black_box(&chiral), 40).unwrap()));
    let p = KaneMeleParams {
        t: 1.0,
        lambda_so: 0.06,
        lambda_r: 0.05,
        lambda_v: 0.1,
    };
    g.bench_function("z2_mass_rule", |b| b.iter(|| z2_kane_mele(&kane_mele(black_box(p))).unwrap()));
    g.bench_function("z2_wilson_96", |b| b.iter(|| z2_wilson_loop(black_box(p), 96).unwrap()));
    g.finish();
}

criterion_group!(benches, eigensolver, trajectories, invariants);
criterion_main!(benches);
