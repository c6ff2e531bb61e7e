use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use thiserror::Error;

use crate::report::{CheckRow, GeodesicResult, RunReport, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("plot {name}: {message}")]
    Plot { name: String, message: String },
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), OutputError> {
    let io = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub const CSV_COLUMNS: &[&str] = &[
    "schema_version",
    "group",
    "word",
    "check",
    "l_classical",
    "l_convention",
    "dl_re",
    "dl_im",
    "h_re",
    "h_im",
    "value",
    "bound",
    "margin",
    "budget",
    "pass",
];

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row(out: &mut String, c: &CheckRow, g: Option<&GeodesicResult>) {
    let cols = [
        SCHEMA_VERSION.to_string(),
        field(&c.group),
        field(&c.word),
        field(&c.check),
        opt(g.map(|g| g.l_classical)),
        opt(g.map(|g| g.l_convention)),
        opt(g.map(|g| g.first_variation.re)),
        opt(g.map(|g| g.first_variation.im)),
        opt(g.and_then(|g| g.h).map(|h| h.re)),
        opt(g.and_then(|g| g.h).map(|h| h.im)),
        num(c.value),
        num(c.bound),
        num(c.margin),
        num(c.budget),
        c.pass.to_string(),
    ];
    out.push_str(&cols.join(","));
    out.push('\n');
}

/// One row per check, with the geodesic columns filled when the check
/// belongs to a geodesic.
pub fn checks_csv(report: &RunReport) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for c in &report.checks {
        csv_row(&mut out, c, report.geodesic(&c.word));
    }
    out
}

fn plot_err(name: &str) -> impl Fn(String) -> OutputError + '_ {
    move |message| OutputError::Plot {
        name: name.to_string(),
        message,
    }
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-12 * hi.abs().max(1.0));
    (lo - pad, hi + pad)
}

pub fn line_plot(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    x: &[f64],
    y: &[f64],
) -> Result<String, OutputError> {
    let e = plot_err(title);
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (720, 420)).into_drawing_area();
        root.fill(&WHITE).map_err(|x| e(x.to_string()))?;
        let (x0, x1) = range(x.iter().copied());
        let (y0, y1) = range(y.iter().copied());
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(x0..x1, y0..y1)
            .map_err(|x| e(x.to_string()))?;
        chart
            .configure_mesh()
            .x_desc(xlabel)
            .y_desc(ylabel)
            .draw()
            .map_err(|x| e(x.to_string()))?;
        chart
            .draw_series(LineSeries::new(
                x.iter().copied().zip(y.iter().copied()),
                &BLUE,
            ))
            .map_err(|x| e(x.to_string()))?;
        root.present().map_err(|x| e(x.to_string()))?;
    }
    Ok(svg)
}

/// Finite-difference derivative against the formula, with the diagonal.
pub fn scatter_plot(title: &str, points: &[(f64, f64)]) -> Result<String, OutputError> {
    let e = plot_err(title);
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (520, 520)).into_drawing_area();
        root.fill(&WHITE).map_err(|x| e(x.to_string()))?;
        let (lo, hi) = range(points.iter().flat_map(|&(a, b)| [a, b]));
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(lo..hi, lo..hi)
            .map_err(|x| e(x.to_string()))?;
        chart
            .configure_mesh()
            .x_desc("formula")
            .y_desc("finite difference")
            .draw()
            .map_err(|x| e(x.to_string()))?;
        chart
            .draw_series(LineSeries::new([(lo, lo), (hi, hi)], &BLACK.mix(0.4)))
            .map_err(|x| e(x.to_string()))?;
        chart
            .draw_series(points.iter().map(|&p| Circle::new(p, 4, RED.filled())))
            .map_err(|x| e(x.to_string()))?;
        root.present().map_err(|x| e(x.to_string()))?;
    }
    Ok(svg)
}

fn file_safe(word: &str) -> String {
    word.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Writes `report.json`, `checks.csv` and the plots into `dir`; returns the
/// paths written.
pub fn emit_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, OutputError> {
    let mut written = Vec::new();
    let mut put = |name: String, body: &[u8]| -> Result<(), OutputError> {
        let p = dir.join(name);
        write_atomic(&p, body)?;
        written.push(p);
        Ok(())
    };
    put("report.json".into(), report.to_json().as_bytes())?;
    put("checks.csv".into(), checks_csv(report).as_bytes())?;
    for g in &report.geodesics {
        if let Some(p) = &g.profile {
            let w = file_safe(&g.word);
            put(
                format!("phi_{w}.svg"),
                line_plot(&format!("φ along {}", g.word), "t", "Re φ", &p.t, &p.phi)?.as_bytes(),
            )?;
            put(
                format!("a_profile_{w}.svg"),
                line_plot(
                    &format!("|a(t)| along {}", g.word),
                    "t",
                    "|a|",
                    &p.t,
                    &p.a_abs,
                )?
                .as_bytes(),
            )?;
        }
    }
    if let Some(f) = &report.family {
        let pts: Vec<(f64, f64)> = f.checks.iter().map(|c| (c.formula, c.fd)).collect();
        put(
            "fd_vs_formula.svg".into(),
            scatter_plot("length derivatives", &pts)?.as_bytes(),
        )?;
    }
    Ok(written)
}

/// Human-readable summary of a run.
pub fn summary(report: &RunReport) -> String {
    let mut s = String::new();
    for l in &report.lengths {
        let _ = writeln!(
            s,
            "length {:>8}  l = {:.12}  (classical {:.12})",
            l.word, l.l_convention, l.l_classical
        );
    }
    for c in &report.checks {
        let _ = writeln!(
            s,
            "{} {:<16} {:<8} {:<28} value {:>11.3e} margin {:>11.3e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.group,
            c.word,
            c.check,
            c.value,
            c.margin
        );
    }
    for e in &report.errors {
        let _ = writeln!(s, "ERROR {e}");
    }
    let failed = report.failed().len();
    let _ = writeln!(
        s,
        "{} checks, {} failed: {}",
        report.checks.len(),
        failed,
        if report.pass { "PASS" } else { "FAIL" }
    );
    s
}
