//! Report serialization: JSON with floats at 17 significant digits (reports
//! double as test fixtures, so identical runs must be byte-identical) and a
//! human-readable text form.

use std::io::{self, Write};

use conecheck_core::{ResidualReport, Verdict};
use serde::Serialize;

/// serde_json formatter printing every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// One JSON line per value.
pub fn json_line<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value
        .serialize(&mut ser)
        .expect("reports serialize infallibly");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

pub fn print_report(report: &ResidualReport, json: bool) {
    if json {
        println!("{}", json_line(report));
    } else {
        let verdict = match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
        };
        println!(
            "{:<28} {:<40} {:>12.6e} tol {:>9.1e}  {} ({} pts, {} ms)",
            report.case_id,
            report.check,
            report.max_residual,
            report.tolerance,
            verdict,
            report.points_sampled,
            report.runtime_ms
        );
    }
}
