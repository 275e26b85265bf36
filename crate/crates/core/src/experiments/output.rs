use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::runner::SopCurve;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = [
    "curve_label",
    "x_name",
    "x",
    "sop",
    "ci95_half_width",
    "trials",
];

/// Formats like C's `%.9g`.
pub fn format_g9(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let fixed = format!("{v:.*}", (8 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the curves as CSV: one header line, then one row per point.
pub fn write_csv<W: Write>(curves: &[SopCurve], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for c in curves {
        for p in &c.points {
            w.write_record([
                c.label.as_str(),
                c.x_name.as_str(),
                &format_g9(p.x),
                &format_g9(p.sop),
                &format_g9(p.half_width_95),
                &p.trials.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(curves: &[SopCurve], out: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: out.to_path_buf(),
        source,
    };
    let file = File::create(out).map_err(io_err)?;
    write_csv(curves, BufWriter::new(file)).map_err(|e| io_err(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::runner::SopPoint;

    fn curve(label: &str, xs: &[f64]) -> SopCurve {
        SopCurve {
            label: label.into(),
            x_name: "P_dB".into(),
            points: xs
                .iter()
                .map(|&x| SopPoint {
                    x,
                    sop: 1.0 / (x + 3.0),
                    half_width_95: 1.234_567_891_23e-5,
                    trials: 10_000,
                })
                .collect(),
        }
    }

    #[test]
    fn g9_matches_printf() {
        // reference strings from printf("%.9g")
        for (v, s) in [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (1.234_567_891_23e-5, "1.23456789e-05"),
            (0.0001, "0.0001"),
            (-2.5, "-2.5"),
            (9.999_999_999_9, "10"),
            (1e-300, "1e-300"),
        ] {
            assert_eq!(format_g9(v), s, "{v}");
        }
    }

    #[test]
    fn one_curve_two_points() {
        let mut buf = Vec::new();
        write_csv(&[curve("uniform", &[5.0, 6.0])], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "curve_label,x_name,x,sop,ci95_half_width,trials");
        assert_eq!(lines[1], "uniform,P_dB,5,0.125,1.23456789e-05,10000");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn awkward_labels_are_quoted() {
        let mut buf = Vec::new();
        write_csv(&[curve("a,b \"c\"", &[1.0])], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("\"a,b \"\"c\"\"\",P_dB,"));
    }

    #[test]
    fn round_trip_preserves_printed_values() {
        let curves = vec![curve("x, y", &[5.0, 7.5, 11.0])];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_csv(&curves, &path).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        for (row, p) in rows.iter().zip(&curves[0].points) {
            assert_eq!(&row[0], "x, y");
            for (field, want) in [(2, p.x), (3, p.sop), (4, p.half_width_95)] {
                let got: f64 = row[field].parse().unwrap();
                assert!((got - want).abs() <= 5e-9 * want.abs(), "{got} vs {want}");
            }
            assert_eq!(row[5].parse::<u64>().unwrap(), p.trials);
        }
    }

    #[test]
    fn unwritable_path_reports_io_error() {
        let err = emit_csv(&[], Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
