//! Plain-text number formatting shared by the CSV and JSON writers.

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one CSV row of floats terminated by `\n`.
pub fn write_row<W: std::io::Write>(w: &mut W, values: &[f64]) -> std::io::Result<()> {
    let row: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
    writeln!(w, "{}", row.join(","))
}

/// Parses a CSV body with the given header; returns the rows.
pub fn parse_csv(text: &str, header: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => return Err(format!("unexpected header {h:?}, expected {header:?}")),
        None => return Err("empty file".into()),
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(i, line)| {
            let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
            let row = row.map_err(|e| format!("row {}: {e}", i + 1))?;
            if row.len() != width {
                return Err(format!("row {}: {} columns, expected {width}", i + 1, row.len()));
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_header_is_checked() {
        assert!(parse_csv("a,b\n1,2\n", "t,x").is_err());
        assert_eq!(parse_csv("t,x\n1,2\n", "t,x").unwrap(), vec![vec![1.0, 2.0]]);
    }
}
