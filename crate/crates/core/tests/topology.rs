use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zb_core::dynamics::{default_time_grid, rotation_index, wavepacket_trajectory, PacketGrid, WavePacket};
use zb_core::model::{chiral_ti_3d, kane_mele, kane_mele_sector, maxwell_lattice, spin_j_continuum};
use zb_core::spectral::hermitian_eig;
use zb_core::topology::*;
use zb_core::{KaneMeleParams, Spin, SpinSector, Spinor, ZbError};

fn km(so: f64, r: f64, v: f64) -> KaneMeleParams {
    KaneMeleParams {
        t: 1.0,
        lambda_so: so,
        lambda_r: r,
        lambda_v: v,
    }
}

fn maxwell_ms() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ms = vec![-3.0, -1.0, 1.0, 3.0];
    while ms.len() < 24 {
        let m: f64 = rng.gen_range(-3.5..3.5);
        if [-2.0, 0.0, 2.0].iter().all(|c: &f64| (m - c).abs() >= 0.1) {
            ms.push(m);
        }
    }
    ms
}

#[test]
fn hsp_and_plaquette_chern_agree_for_maxwell() {
    for m in maxwell_ms() {
        let model = maxwell_lattice(1.0, m).unwrap();
        let hsp = chern_hsp_by_band(&model).unwrap();
        for (b, ch) in hsp.iter().enumerate() {
            let pl = chern_plaquette(&model, b).unwrap();
            assert_eq!(Some(pl), ch.as_integer(), "M = {m}, band {b}");
        }
    }
}

#[test]
fn chern_is_linear_in_band_index() {
    for m in maxwell_ms() {
        let model = maxwell_lattice(1.3, m).unwrap();
        let lo = chern_from_hsp(&model, HalfInt::from_int(-1)).unwrap();
        let mid = chern_from_hsp(&model, HalfInt::from_int(0)).unwrap();
        let hi = chern_from_hsp(&model, HalfInt::from_int(1)).unwrap();
        assert_eq!(lo.twice(), -hi.twice());
        assert_eq!(mid.twice(), 0);
    }
}

#[test]
fn band_chern_numbers_sum_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in [-2.7, -0.4, 1.6, 2.5] {
        let model = maxwell_lattice(1.0, m).unwrap();
        let total: i64 = (0..3).map(|b| chern_plaquette(&model, b).unwrap()).sum();
        assert_eq!(total, 0);
    }
    for _ in 0..4 {
        let p = km(rng.gen_range(-0.1..0.1), 0.0, rng.gen_range(-0.3..0.3));
        for sector in [SpinSector::Up, SpinSector::Down] {
            let model = kane_mele_sector(p, sector).unwrap();
            match (chern_plaquette(&model, 0), chern_plaquette(&model, 1)) {
                (Ok(a), Ok(b)) => assert_eq!(a + b, 0),
                (Err(ZbError::BandTouching { .. }), _) => {}
                other => panic!("{other:?}"),
            }
        }
    }
}

#[test]
fn kane_mele_sectors_are_opposite_haldane_insulators() {
    let p = km(0.06, 0.0, 0.1);
    let up = chern_plaquette(&kane_mele_sector(p, SpinSector::Up).unwrap(), 0).unwrap();
    let down = chern_plaquette(&kane_mele_sector(p, SpinSector::Down).unwrap(), 0).unwrap();
    assert_eq!(up.abs(), 1);
    assert_eq!(down, -up);
    let hsp = chern_hsp_by_band(&kane_mele_sector(p, SpinSector::Up).unwrap()).unwrap();
    assert_eq!(hsp[0].as_integer(), Some(up));
}

#[test]
fn mass_is_the_gap_in_mass_generator_units() {
    let models = vec![
        maxwell_lattice(1.0, 1.0).unwrap(),
        maxwell_lattice(0.7, -2.6).unwrap(),
        kane_mele_sector(km(0.06, 0.0, 0.1), SpinSector::Down).unwrap(),
        spin_j_continuum(Spin::from_twice(5).unwrap(), 1.0, 2.0, -0.8),
        chiral_ti_3d(1.5),
    ];
    for model in models {
        let g = &model.generators().matrices()[model.mass_generator().unwrap()];
        let spacing = hermitian_eig(g).min_gap();
        for p in index_points(&model).unwrap() {
            let l = linearize_at_hsp(&model, &p.k).unwrap();
            assert!((l.mass.abs() * spacing - l.gap).abs() < 1e-8 * l.gap.max(1.0), "{}", model.name());
        }
    }
}

#[test]
fn half_integer_spin_reports_raw_values() {
    let model = spin_j_continuum(Spin::HALF, 1.0, 1.0, 1.0);
    let ch = chern_hsp_by_band(&model).unwrap();
    assert_eq!(ch, vec![HalfInt::from_twice(1), HalfInt::from_twice(-1)]);
    let model = spin_j_continuum(Spin::from_twice(3).unwrap(), 1.0, -1.0, 1.0);
    let ch = chern_hsp_by_band(&model).unwrap();
    assert_eq!(ch[0], HalfInt::from_twice(-3));
}

#[test]
fn packet_rotation_matches_local_index() {
    let spinor = Spinor::from_real(&[1.0, 1.0, 0.0]).unwrap();
    for big_m in [-3.0, -1.0, 1.0, 3.0] {
        let model = maxwell_lattice(1.0, big_m).unwrap();
        for p in model.hsps() {
            let l = linearize_at_hsp(&model, &p.k).unwrap();
            let packet = WavePacket::with_spinor(20.0, p.k.clone(), spinor.clone()).unwrap();
            let times = default_time_grid(l.mass.abs());
            let traj = wavepacket_trajectory(&model, &packet, &PacketGrid::default(), &times).unwrap();
            assert_eq!(rotation_index(&traj, (0, 1)).unwrap(), l.nu(), "M = {big_m}, {}", p.label);
        }
    }
}

#[test]
fn winding_formula_matches_integral() {
    for m in [-4.0, -2.0, 0.0, 2.0, 4.0] {
        let model = chiral_ti_3d(m);
        let num = winding_numerical(&model, DEFAULT_WINDING_GRID).unwrap();
        assert!(num.residual < 0.05, "M = {m}: {num:?}");
        assert_eq!(num.value, winding_from_hsp(&model).unwrap(), "M = {m}");
    }
}

#[test]
fn winding_refuses_critical_and_planar_models() {
    assert!(matches!(winding_from_hsp(&chiral_ti_3d(1.0)), Err(ZbError::Gapless(_))));
    let err = winding_numerical(&maxwell_lattice(1.0, 1.0).unwrap(), 8).unwrap_err();
    assert!(matches!(err, ZbError::UnsupportedModel(_)), "{err:?}");
}

#[test]
fn z2_agrees_with_wilson_loop_and_spin_chern() {
    for (so, v) in [(0.06, 0.0), (0.06, 0.1), (0.01, 1.0), (0.05, 0.5), (-0.06, 0.2), (0.1, -0.3)] {
        let p = km(so, 0.0, v);
        let z2 = z2_kane_mele(&kane_mele(p)).unwrap();
        assert_eq!(z2, z2_wilson_loop(p, WILSON_GRID).unwrap(), "{p:?}");
        assert_eq!(z2, z2_spin_chern(p).unwrap(), "{p:?}");
    }
}

#[test]
fn z2_is_stable_along_an_open_rashba_ramp() {
    for r in [0.0, 0.02, 0.05, 0.08] {
        let p = km(0.06, r, 0.1);
        let rep = z2_kane_mele_report(&kane_mele(p)).unwrap();
        assert_eq!(rep.z2, 1, "lambda_R = {r}");
        assert_eq!(z2_wilson_loop(p, WILSON_GRID).unwrap(), 1, "lambda_R = {r}");
    }
}

#[test]
fn z2_refuses_a_ramp_through_a_gap_closing() {
    let p = km(0.06, 0.2, 0.1);
    assert!(matches!(z2_kane_mele(&kane_mele(p)), Err(ZbError::Gapless(_))));
    assert_eq!(z2_wilson_loop(p, WILSON_GRID).unwrap(), 0);
}

#[test]
fn report_cross_methods_agree_when_gapped() {
    for m in [-3.0, -1.0, 1.0, 3.0] {
        let r = invariant_report(&maxwell_lattice(1.0, m).unwrap(), ReportOptions::default()).unwrap();
        let hsp: Vec<Option<i64>> = r.chern_hsp.unwrap().iter().map(|c| c.as_integer()).collect();
        let pl: Vec<Option<i64>> = r.chern_plaquette.unwrap().into_iter().map(Some).collect();
        assert_eq!(hsp, pl);
    }
    let r = invariant_report(&kane_mele(km(0.06, 0.05, 0.1)), ReportOptions::default()).unwrap();
    assert_eq!(r.z2, Some(1));
    assert_eq!(r.hsp.len(), 2);
}
