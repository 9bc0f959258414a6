//! CSV and plot-data export with reproducible byte-exact formatting.

use crate::runner::SweepRow;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Scientific notation with 17 significant digits: enough to round-trip any
/// f64 exactly, so identical sweeps always serialize to identical bytes and
/// regression diffs are meaningful down to the last bit.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn result_columns(row: &SweepRow) -> (f64, f64, f64, f64) {
    match &row.result {
        Ok(res) => (res.t, res.r, res.e_av, res.unitarity_defect),
        // A failed row keeps its place in the file; NaN marks every derived
        // column so downstream tools cannot mistake it for data.
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    }
}

fn oracle_columns(row: &SweepRow) -> (f64, f64) {
    match row.oracle.as_ref() {
        Some(Ok((t, r))) => (*t, *r),
        _ => (f64::NAN, f64::NAN),
    }
}

/// Write the sweep as CSV. The header is `E,T,R,E_av,unitarity_defect`, with
/// `,T_oracle,R_oracle` appended when `oracle` is set; one line per row.
pub fn write_csv(rows: &[SweepRow], oracle: bool, path: &Path) -> io::Result<()> {
    let mut out = String::from("E,T,R,E_av,unitarity_defect");
    if oracle {
        out.push_str(",T_oracle,R_oracle");
    }
    out.push('\n');
    for row in rows {
        let (t, r, e_av, defect) = result_columns(row);
        out.push_str(&format!(
            "{},{},{},{},{}",
            full(row.e),
            full(t),
            full(r),
            full(e_av),
            full(defect)
        ));
        if oracle {
            let (to, ro) = oracle_columns(row);
            out.push_str(&format!(",{},{}", full(to), full(ro)));
        }
        out.push('\n');
    }
    fs::write(path, out)
}

/// Write one two-column (`E value`) space-separated file per series into
/// `dir`: `<stem>_T.dat`, `<stem>_R.dat`, `<stem>_Eav.dat`, and with `oracle`
/// also `<stem>_T_oracle.dat` and `<stem>_R_oracle.dat`. Returns the paths
/// written, in that order.
pub fn write_plot_data(
    rows: &[SweepRow],
    oracle: bool,
    dir: &Path,
    stem: &str,
) -> io::Result<Vec<PathBuf>> {
    let mut series: Vec<(&str, Vec<f64>)> = vec![
        ("T", rows.iter().map(|r| result_columns(r).0).collect()),
        ("R", rows.iter().map(|r| result_columns(r).1).collect()),
        ("Eav", rows.iter().map(|r| result_columns(r).2).collect()),
    ];
    if oracle {
        series.push(("T_oracle", rows.iter().map(|r| oracle_columns(r).0).collect()));
        series.push(("R_oracle", rows.iter().map(|r| oracle_columns(r).1).collect()));
    }
    let mut written = Vec::new();
    for (name, values) in series {
        let mut out = String::new();
        for (row, v) in rows.iter().zip(values) {
            out.push_str(&format!("{} {}\n", full(row.e), full(v)));
        }
        let path = dir.join(format!("{stem}_{name}.dat"));
        fs::write(&path, out)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vrm_core::TunnelingResult;

    fn row(e: f64) -> SweepRow {
        SweepRow {
            e,
            result: Ok(TunnelingResult {
                e,
                t: 0.25,
                r: 0.75,
                e_av: e * 1.001,
                unitarity_defect: 1e-9,
                cond_indicator: 1e3,
            }),
            oracle: Some(Ok((0.2501, 0.7499))),
        }
    }

    #[test]
    fn header_and_row_count_match_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_csv(&[row(0.5), row(1.0)], true, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "E,T,R,E_av,unitarity_defect,T_oracle,R_oracle");
        assert_eq!(lines[1].split(',').count(), 7);
    }

    #[test]
    fn oracle_off_drops_the_extra_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let mut r = row(0.5);
        r.oracle = None;
        write_csv(&[r], false, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), "E,T,R,E_av,unitarity_defect");
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 5);
    }

    #[test]
    fn failed_rows_serialize_as_nan_but_keep_their_place() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let bad = SweepRow { e: 0.7, result: Err("boom".into()), oracle: None };
        write_csv(&[row(0.5), bad, row(1.0)], false, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let middle = text.lines().nth(2).unwrap();
        assert!(middle.starts_with("7.0000000000000000e-1,NaN,NaN,NaN,NaN"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn plot_files_cover_every_series() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_plot_data(&[row(0.5)], true, dir.path(), "demo").unwrap();
        let names: Vec<String> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            vec![
                "demo_T.dat",
                "demo_R.dat",
                "demo_Eav.dat",
                "demo_T_oracle.dat",
                "demo_R_oracle.dat"
            ]
        );
        let t = fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(t.trim().split_whitespace().count(), 2);
    }
}
