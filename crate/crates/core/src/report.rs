//! Report files: `segments.csv`, `summary.csv`, `path.svg`, `report.txt`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{self, Point, Pose};
use crate::model::{self, LengthVector, ScenarioConfig};
use crate::solution::PathSolution;
use crate::solver::PlanReport;
use crate::validate::{time_breakdown_for, ValidationReport};

pub const SEGMENTS_HEADER: &str = "index,kind,signed_curvature,length,duration,start_x,start_y,start_theta";
pub const SUMMARY_HEADER: &str = "status,pattern,f,intercept_x,intercept_y,total_time,source";

/// Fixed six-decimal formatting used in every CSV cell.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn rounded(v: f64) -> f64 {
    fmt6(v).parse().expect("formatted float parses")
}

fn kind(i: usize, last: usize) -> &'static str {
    if i == last {
        "Target"
    } else {
        ["L", "R", "S"][i % 3]
    }
}

struct SegmentRow {
    kind: &'static str,
    curvature: f64,
    length: f64,
    duration: f64,
    start: Pose,
}

fn segment_rows(config: &ScenarioConfig, sol: &PathSolution) -> Result<Vec<SegmentRow>> {
    let blocks = model::pursuer_chain(config, &sol.lengths)?;
    let times = time_breakdown_for(&sol.lengths, config.pursuer_speed(), config.target_speed())?;
    let last = sol.lengths.len() - 1;
    let mut rows = Vec::with_capacity(sol.lengths.len());
    for (k, block) in blocks.iter().enumerate() {
        let mut pose = block.start;
        for (j, seg) in block.segments.iter().enumerate() {
            let i = 3 * k + j;
            rows.push(SegmentRow {
                kind: kind(i, last),
                curvature: seg.curvature.value(),
                length: seg.length,
                duration: times.pursuer[i],
                start: pose,
            });
            pose = seg.propagate(pose)?;
        }
    }
    rows.push(SegmentRow {
        kind: "Target",
        curvature: 0.0,
        length: sol.lengths.target(),
        duration: times.target,
        start: config.target(),
    });
    Ok(rows)
}

pub fn segments_csv(config: &ScenarioConfig, solution: Option<&PathSolution>) -> Result<String> {
    let mut out = String::from(SEGMENTS_HEADER);
    out.push('\n');
    if let Some(sol) = solution {
        for (i, r) in segment_rows(config, sol)?.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                i + 1,
                r.kind,
                fmt6(r.curvature),
                fmt6(r.length),
                fmt6(r.duration),
                fmt6(r.start.x),
                fmt6(r.start.y),
                fmt6(r.start.theta)
            );
        }
    }
    Ok(out)
}

/// Objective and total time as the sums of the rounded CSV cells, so the
/// summary agrees exactly with `segments.csv`.
fn csv_totals(config: &ScenarioConfig, sol: &PathSolution) -> Result<(f64, f64)> {
    let times = time_breakdown_for(&sol.lengths, config.pursuer_speed(), config.target_speed())?;
    let f = sol.lengths.iter().map(|&l| rounded(l)).sum();
    let t = times.pursuer.iter().map(|&d| rounded(d)).sum();
    Ok((f, t))
}

pub fn summary_csv(config: &ScenarioConfig, report: &PlanReport) -> Result<String> {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    let Some(best) = &report.best else {
        out.push_str("INFEASIBLE,,,,,,\n");
        return Ok(out);
    };
    let mut row = |status: &str, s: &PathSolution| -> Result<()> {
        let (f, t) = csv_totals(config, s)?;
        let _ = writeln!(
            out,
            "{status},{},{},{},{},{},{:?}",
            s.pattern.label(),
            fmt6(f),
            fmt6(s.intercept.x),
            fmt6(s.intercept.y),
            fmt6(t),
            s.source
        );
        Ok(())
    };
    row("OPTIMAL", best)?;
    for s in report.all_feasible.iter().filter(|s| *s != best) {
        row("FEASIBLE", s)?;
    }
    Ok(out)
}

/// Reads the lengths back from a `segments.csv`.
pub fn read_segments_csv(config: &ScenarioConfig, text: &str) -> Result<LengthVector> {
    let ctx = "segments csv";
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::parse(ctx, "empty file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::parse(ctx, format!("missing column `{name}`")))
    };
    let (kind_col, len_col) = (col("kind")?, col("length")?);
    let expected = config.dimension();
    let mut lengths = Vec::with_capacity(expected);
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(Error::parse(ctx, format!("row {} has {} cells, header has {}", i + 1, cells.len(), cols.len())));
        }
        if i < expected && cells[kind_col] != kind(i, expected - 1) {
            return Err(Error::parse(
                ctx,
                format!("row {} has kind `{}`, expected `{}`", i + 1, cells[kind_col], kind(i, expected - 1)),
            ));
        }
        let v: f64 = cells[len_col]
            .parse()
            .map_err(|e| Error::parse(ctx, format!("row {} length `{}`: {e}", i + 1, cells[len_col])))?;
        lengths.push(v);
    }
    if lengths.len() != expected {
        return Err(Error::parse(
            ctx,
            format!("{} segment rows for a scenario needing {expected}", lengths.len()),
        ));
    }
    LengthVector::new(lengths)
}

#[derive(Default)]
struct Bounds {
    min: Option<(f64, f64)>,
    max: Option<(f64, f64)>,
}

impl Bounds {
    fn add(&mut self, p: Point) {
        if !p.is_finite() {
            return;
        }
        let (a, b) = self.min.unwrap_or((p.x, p.y));
        self.min = Some((a.min(p.x), b.min(p.y)));
        let (a, b) = self.max.unwrap_or((p.x, p.y));
        self.max = Some((a.max(p.x), b.max(p.y)));
    }

    fn add_circle(&mut self, c: Point, r: f64) {
        self.add(Point::new(c.x - r, c.y - r));
        self.add(Point::new(c.x + r, c.y + r));
    }
}

fn n4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" { "0.0000".to_string() } else { s }
}

/// 2D overhead view, y up, one user unit per scenario length unit.
pub fn path_svg(config: &ScenarioConfig, solution: Option<&PathSolution>) -> Result<String> {
    let mut bounds = Bounds::default();
    bounds.add(config.pursuer().position());
    bounds.add(config.target().position());
    for o in config.obstacles() {
        bounds.add_circle(o.center(), o.radius());
    }

    let mut path_pts = Vec::new();
    let mut turn_circles = Vec::new();
    let mut markers = Vec::new();
    if let Some(sol) = solution {
        let blocks = model::pursuer_chain(config, &sol.lengths)?;
        let span = sol.lengths.pursuer_total().max(1e-9);
        let step = span / 2000.0;
        for block in &blocks {
            let mut pose = block.start;
            markers.push(block.start.position());
            for seg in &block.segments {
                if seg.length > 0.0 && !seg.curvature.is_straight() {
                    if let Some(c) = geometry::turn_center(pose, seg.curvature) {
                        turn_circles.push((c, 1.0 / seg.curvature.magnitude()));
                    }
                }
                pose = seg.propagate(pose)?;
            }
            let pts = geometry::sample_path(block.start, &block.segments, step)?;
            path_pts.push(pts.iter().map(Pose::position).collect::<Vec<_>>());
            markers.push(block.end.position());
        }
        markers.push(sol.intercept);
        bounds.add(sol.intercept);
    }
    for pts in &path_pts {
        for p in pts {
            bounds.add(*p);
        }
    }
    for (c, r) in &turn_circles {
        bounds.add_circle(*c, *r);
    }

    let (x0, y0) = bounds.min.unwrap_or((0.0, 0.0));
    let (x1, y1) = bounds.max.unwrap_or((1.0, 1.0));
    let w = (x1 - x0).max(1e-6);
    let h = (y1 - y0).max(1e-6);
    let (mx, my) = (0.1 * w, 0.1 * h);
    let (vx, vy, vw, vh) = (x0 - mx, -(y1 + my), w + 2.0 * mx, h + 2.0 * my);
    let stroke = vw.max(vh) / 400.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        n4(vx),
        n4(vy),
        n4(vw),
        n4(vh),
        (800.0 * vh / vw).round().max(1.0)
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{}">"#, n4(stroke));
    for o in config.obstacles() {
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" stroke="#888888" fill="#dddddd"/>"##,
            n4(o.center().x),
            n4(o.center().y),
            n4(o.radius())
        );
    }
    for (c, r) in &turn_circles {
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" stroke="#6699cc" stroke-dasharray="{} {}"/>"##,
            n4(c.x),
            n4(c.y),
            n4(*r),
            n4(4.0 * stroke),
            n4(3.0 * stroke)
        );
    }
    let t0 = config.target().position();
    let t1 = solution.map_or(t0, |s| s.intercept);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#cc3333"/>"##,
        n4(t0.x),
        n4(t0.y),
        n4(t1.x),
        n4(t1.y)
    );
    for pts in &path_pts {
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", n4(p.x), n4(p.y))).collect();
        let _ = writeln!(s, r##"<polyline points="{}" stroke="#1f4e99"/>"##, coords.join(" "));
    }
    for m in &markers {
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" fill="#000000" stroke="none"/>"##,
            n4(m.x),
            n4(m.y),
            n4(2.0 * stroke)
        );
    }
    let p0 = config.pursuer().position();
    let _ = writeln!(
        s,
        r##"<circle cx="{}" cy="{}" r="{}" fill="#1f4e99" stroke="none"/>"##,
        n4(p0.x),
        n4(p0.y),
        n4(3.0 * stroke)
    );
    let _ = writeln!(
        s,
        r##"<circle cx="{}" cy="{}" r="{}" fill="#cc3333" stroke="none"/>"##,
        n4(t0.x),
        n4(t0.y),
        n4(3.0 * stroke)
    );
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

pub fn report_text(
    config: &ScenarioConfig,
    report: &PlanReport,
    validation: Option<&ValidationReport>,
) -> String {
    let mut s = String::new();
    let p = config.pursuer();
    let t = config.target();
    let _ = writeln!(s, "scenario");
    let _ = writeln!(
        s,
        "  pursuer  ({}, {}) heading {} speed {} turn radius {}",
        p.x, p.y, p.theta, config.pursuer_speed(), config.min_turn_radius()
    );
    let _ = writeln!(s, "  target   ({}, {}) heading {} speed {}", t.x, t.y, t.theta, config.target_speed());
    for (i, o) in config.obstacles().iter().enumerate() {
        let _ = writeln!(s, "  obstacle {} centre {} radius {}", i + 1, o.center(), o.radius());
    }
    let _ = writeln!(s);
    match &report.best {
        None => {
            let _ = writeln!(s, "result: INFEASIBLE");
        }
        Some(b) => {
            let _ = writeln!(s, "result: {} ({:?})", b.pattern.label(), b.source);
            let _ = writeln!(s, "  f              {:.6}", b.objective());
            let _ = writeln!(s, "  intercept      ({:.6}, {:.6})", b.intercept.x, b.intercept.y);
            let _ = writeln!(s, "  total time     {:.6}", b.total_time());
            let _ = writeln!(s, "  pursuer dist   {:.6}", b.pursuer_distance());
            let _ = writeln!(s, "  target dist    {:.6}", b.target_distance());
            let _ = writeln!(s, "  residual       {:.3e}", b.residual_norm);
            let lens: Vec<String> = b.lengths.iter().map(|l| format!("{l:.4}")).collect();
            let _ = writeln!(s, "  lengths        {}", lens.join(" "));
            if !b.mixed_circles.is_empty() {
                let _ = writeln!(s, "  both arcs active on circles {:?}", b.mixed_circles);
            }
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "feasible solutions: {}", report.all_feasible.len());
    for f in &report.all_feasible {
        let _ = writeln!(s, "  {:<24} f={:.6} ({:?})", f.pattern.label(), f.objective(), f.source);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "solver diagnostics");
    for d in &report.diagnostics {
        let _ = writeln!(
            s,
            "  {:<24} {:?} starts={} converged={} rejected={} iters={} best_residual={:.3e} time={:.4}s",
            d.label, d.status, d.starts, d.converged_starts, d.rejected_starts, d.iterations, d.best_residual, d.wall_time_s
        );
    }
    if let Some(v) = validation {
        let _ = writeln!(s);
        let _ = writeln!(s, "validation ({:?}, dt={:.3e})", v.mode, v.dt);
        let _ = writeln!(s, "  miss distance  {:.6e}", v.miss_distance);
        let _ = writeln!(s, "  length error   {:.6e}", v.length_error);
        let _ = writeln!(s, "  time error     {:.6e}", v.time_error);
        let _ = writeln!(s, "  tangency gap   {:.6e}", v.tangency_gap);
        let _ = writeln!(s, "  max pin jump   {:.6e}", v.max_pin_jump);
        for j in &v.junctions {
            let _ = writeln!(s, "    obstacle {}: line gap {:.6e}, pin jump {:.6e}", j.obstacle + 1, j.line_gap, j.pin_jump);
        }
        if v.clearance_violations.is_empty() {
            let _ = writeln!(s, "  clearance      ok");
        }
        for c in &v.clearance_violations {
            let _ = writeln!(s, "  clearance      obstacle {} penetrated by {:.6e}", c.obstacle + 1, c.depth);
        }
    }
    s
}

/// Writes the four report files into `out_dir`, creating it if needed.
pub fn emit_report(
    config: &ScenarioConfig,
    report: &PlanReport,
    validation: Option<&ValidationReport>,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("segments.csv", segments_csv(config, report.best.as_ref())?),
        ("summary.csv", summary_csv(config, report)?),
        ("path.svg", path_svg(config, report.best.as_ref())?),
        ("report.txt", report_text(config, report, validation)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
