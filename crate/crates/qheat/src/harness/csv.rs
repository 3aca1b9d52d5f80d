//! CSV persistence with an exact byte-level contract.
//!
//! Header and column order are fixed; floats print in shortest round-trip
//! decimal form (Rust's `Display`); missing values (unconverged points,
//! undefined windings, single-bath P₂) are empty fields, never NaN; rows
//! end with `\n`.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::error::ConfigError;
use crate::observables::PowerSpectrumPoint;

pub const CSV_HEADER: &str =
    "f_L_GHz,dt1_ns,P_total_fW,P1_fW,P2_fW,P_dimensionless,rho_ee_p,winding,purity_min,converged,cycles";

fn push_opt_float(line: &mut String, value: Option<f64>) {
    line.push(',');
    if let Some(v) = value {
        debug_assert!(!v.is_nan(), "CSV contract forbids NaN");
        let _ = write!(line, "{v}");
    }
}

/// Render rows to the exact CSV format.
pub fn render_csv(points: &[PowerSpectrumPoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let mut line = String::with_capacity(64);
        let _ = write!(line, "{}", p.f_l_ghz);
        push_opt_float(&mut line, p.dt1_ns);
        push_opt_float(&mut line, p.p_total_fw);
        push_opt_float(&mut line, p.p1_fw);
        push_opt_float(&mut line, p.p2_fw);
        push_opt_float(&mut line, p.p_dimensionless);
        push_opt_float(&mut line, p.rho_ee_p);
        line.push(',');
        if let Some(w) = p.winding {
            let _ = write!(line, "{w}");
        }
        push_opt_float(&mut line, p.purity_min);
        let _ = write!(line, ",{},{}", p.converged, p.cycles);
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Write rows to any writer.
pub fn write_csv<W: Write>(points: &[PowerSpectrumPoint], writer: &mut W) -> io::Result<()> {
    writer.write_all(render_csv(points).as_bytes())
}

/// Write rows to a file, reporting the path on failure.
pub fn write_csv_file(points: &[PowerSpectrumPoint], path: &Path) -> Result<(), ConfigError> {
    std::fs::write(path, render_csv(points)).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_opt_float(field: &str, line: usize) -> Result<Option<f64>, ConfigError> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| ConfigError::Parse {
            line,
            message: format!("bad float '{field}'"),
        })
}

/// Parse CSV text produced by [`render_csv`] back into rows (powers return
/// in watts).
pub fn parse_csv(text: &str) -> Result<Vec<PowerSpectrumPoint>, ConfigError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        other => {
            return Err(ConfigError::Parse {
                line: 1,
                message: format!("bad header: {:?}", other.map(|(_, h)| h)),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("expected 11 fields, got {}", fields.len()),
            });
        }
        out.push(PowerSpectrumPoint {
            f_l_ghz: parse_opt_float(fields[0], line_no)?.ok_or(ConfigError::Parse {
                line: line_no,
                message: "missing f_L_GHz".into(),
            })?,
            dt1_ns: parse_opt_float(fields[1], line_no)?,
            p_total_fw: parse_opt_float(fields[2], line_no)?,
            p1_fw: parse_opt_float(fields[3], line_no)?,
            p2_fw: parse_opt_float(fields[4], line_no)?,
            p_dimensionless: parse_opt_float(fields[5], line_no)?,
            rho_ee_p: parse_opt_float(fields[6], line_no)?,
            winding: if fields[7].is_empty() {
                None
            } else {
                Some(fields[7].parse::<i32>().map_err(|_| ConfigError::Parse {
                    line: line_no,
                    message: format!("bad winding '{}'", fields[7]),
                })?)
            },
            purity_min: parse_opt_float(fields[8], line_no)?,
            converged: match fields[9] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        message: format!("bad converged flag '{other}'"),
                    })
                }
            },
            cycles: fields[10]
                .parse::<usize>()
                .map_err(|_| ConfigError::Parse {
                    line: line_no,
                    message: format!("bad cycles '{}'", fields[10]),
                })?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_point() -> PowerSpectrumPoint {
        PowerSpectrumPoint {
            f_l_ghz: 6.162277660168379,
            dt1_ns: None,
            p_total_fw: Some(0.707),
            p1_fw: Some(0.707),
            p2_fw: None,
            p_dimensionless: Some(0.0123),
            rho_ee_p: Some(0.016),
            winding: Some(1),
            purity_min: Some(0.91),
            converged: true,
            cycles: 612,
        }
    }

    #[test]
    fn header_and_shape() {
        let text = render_csv(&[sample_point()]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 11);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn unconverged_rows_have_empty_fields_not_nan() {
        let p = PowerSpectrumPoint {
            f_l_ghz: 2.0,
            dt1_ns: None,
            p_total_fw: None,
            p1_fw: None,
            p2_fw: None,
            p_dimensionless: None,
            rho_ee_p: None,
            winding: None,
            purity_min: None,
            converged: false,
            cycles: 20000,
        };
        let text = render_csv(&[p]);
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row, "2,,,,,,,,,false,20000");
        assert!(!text.contains("NaN"));
    }

    proptest! {
        /// Writing then parsing reproduces every float exactly (the watt
        /// fields go through the same fW scaling both ways).
        #[test]
        fn round_trip_is_exact(
            f in 0.5f64..10.0,
            dt1 in proptest::option::of(1e-3f64..2.0),
            p_fw in proptest::option::of(-1e3f64..1e3),
            winding in proptest::option::of(-6i32..6),
            purity in proptest::option::of(0.5f64..1.0),
            cycles in 0usize..30000,
            converged in any::<bool>(),
        ) {
            let point = PowerSpectrumPoint {
                f_l_ghz: f,
                dt1_ns: dt1,
                p_total_fw: p_fw,
                p1_fw: p_fw.map(|x| x * 0.25),
                p2_fw: None,
                p_dimensionless: p_fw,
                rho_ee_p: purity.map(|x| 1.0 - x),
                winding,
                purity_min: purity,
                converged,
                cycles,
            };
            let text = render_csv(std::slice::from_ref(&point));
            let parsed = parse_csv(&text).unwrap();
            prop_assert_eq!(parsed.len(), 1);
            let q = &parsed[0];
            prop_assert_eq!(q.f_l_ghz.to_bits(), point.f_l_ghz.to_bits());
            prop_assert_eq!(q.dt1_ns.map(f64::to_bits), point.dt1_ns.map(f64::to_bits));
            prop_assert_eq!(q.p_dimensionless.map(f64::to_bits), point.p_dimensionless.map(f64::to_bits));
            prop_assert_eq!(q.winding, point.winding);
            prop_assert_eq!(q.converged, point.converged);
            prop_assert_eq!(q.cycles, point.cycles);
            prop_assert_eq!(q.p_total_fw.map(f64::to_bits), point.p_total_fw.map(f64::to_bits));
            prop_assert_eq!(q.p1_fw.map(f64::to_bits), point.p1_fw.map(f64::to_bits));
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_csv("not,a,header\n").is_err());
        let bad_row = format!("{CSV_HEADER}\n1.0,,,,\n");
        assert!(parse_csv(&bad_row).is_err());
        let bad_float = format!("{CSV_HEADER}\nxyz,,,,,,,,,true,3\n");
        assert!(parse_csv(&bad_float).is_err());
    }
}
