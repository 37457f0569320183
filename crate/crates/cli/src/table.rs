//! Plain-text rendering of bound reports.

use johnkit::report::BoundReport;
use std::fmt::Write;

pub fn render(reports: &[BoundReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>16}  {:>16}  {:>16}  status",
        "name", "bound", "measured", "slack"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>16.9e}  {:>16.9e}  {:>16.9e}  {}",
            r.name,
            r.bound,
            r.measured,
            r.slack,
            if r.pass { "ok" } else { "VIOLATED" }
        );
    }
    out
}
