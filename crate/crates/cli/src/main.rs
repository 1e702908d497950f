mod parse;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use lfmap::characters::{enumerate_characters, DirichletCharacter};
use lfmap::lfunction::{eval, eval_derivative, Target};
use lfmap::preimage::{
    check_color_alternation, circle_preimage, find_strips, fundamental_domains, real_preimage_components,
    trace_real_preimage, CurveComponent, Window,
};
use lfmap::render::{overlay_curves, render_mesh, render_two_color, rotate, write_ppm, ColorScheme, OverlayStyle};
use lfmap::report::VerificationSummary;
use lfmap::suite::{
    check_conjugation, check_factorization, check_functional_equation, check_intertwining_all, factorization_grid,
    random_points, report_suite, DEFAULT_SEED, RH_TOL, SIMPLE_THRESHOLD,
};
use lfmap::zeros::{find_zeros, trivial_zeros, verify_rh, verify_simple, Zero, ZeroRecord};

const SCHEMA_VERSION: u32 = 1;

/// Dirichlet L-functions: evaluation, zeros, real-axis pre-images, strips,
/// fundamental domains and conformal-map images.
#[derive(Parser)]
#[command(name = "lfmap", version)]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct CharArgs {
    /// Modulus q.
    #[arg(long, short = 'q')]
    modulus: u64,
    /// Character index, 1-based; index 1 is the principal character.
    #[arg(long, short = 'j')]
    index: usize,
}

impl CharArgs {
    fn character(self) -> anyhow::Result<DirichletCharacter> {
        Ok(DirichletCharacter::new(self.modulus, self.index)?)
    }
}

fn target(text: &str) -> Result<Target, String> {
    text.parse().map_err(|e: lfmap::Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// List the characters mod q.
    Chars {
        #[arg(long, short = 'q')]
        modulus: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate L or L' at one point.
    Eval {
        #[command(flatten)]
        chi: CharArgs,
        /// The point, e.g. 0.5+14.1i.
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, value_parser = target, default_value = "L")]
        target: Target,
    },
    /// Nontrivial zeros with t_min <= Im s <= t_max.
    Zeros {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long, value_parser = target, default_value = "L")]
        target: Target,
        /// Write the document here instead of stdout.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// The first trivial zeros.
    TrivialZeros {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Trace pre-images of the real axis.
    Trace {
        #[command(flatten)]
        chi: CharArgs,
        /// sigma0,sigma1,t0,t1
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: Window,
        /// Trace only the component through this point.
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        seed: Option<Complex64>,
        #[arg(long, value_parser = target, default_value = "L")]
        target: Target,
        /// Write the vertices as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Strips between consecutive Gamma' curves.
    Strips {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: Window,
    },
    /// Fundamental domains of every complete strip.
    Domains {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: Window,
    },
    /// Render a PPM image of the map.
    Render {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: Window,
        /// WIDTHxHEIGHT
        #[arg(long, value_parser = parse::size, default_value = "600x1200")]
        size: (usize, usize),
        #[arg(long, value_enum, default_value_t = Style::TwoColor)]
        style: Style,
        #[arg(long, value_parser = target, default_value = "L")]
        target: Target,
        /// Draw the real-axis pre-images and the zeros on top.
        #[arg(long)]
        overlay: bool,
        /// Turn the image a quarter counterclockwise.
        #[arg(long)]
        rotate: bool,
        #[arg(long, short = 'o')]
        output: PathBuf,
    },
    /// Run one check; exits 2 on FAIL.
    Verify {
        #[command(subcommand)]
        check: Verify,
    },
    /// Every check for every character up to a modulus; exits 2 on any FAIL.
    Suite {
        #[arg(long, default_value_t = 10)]
        q_max: u64,
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    TwoColor,
    Mesh,
}

#[derive(Subcommand)]
enum Verify {
    /// Functional equation at random points.
    Fe {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        points: usize,
    },
    /// L(conj s, conj chi) = conj L(s, chi) at random points.
    Conj {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        points: usize,
    },
    /// L against its primitive inducer times the missing Euler factors.
    Factor {
        #[command(flatten)]
        chi: CharArgs,
    },
    /// Zeros on the critical line, paired with the dual character.
    Rh {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, default_value_t = RH_TOL)]
        tol: f64,
        /// Check the zeros in this file instead of scanning.
        #[arg(long)]
        zeros_file: Option<PathBuf>,
    },
    /// |f'| bounded away from zero at every zero.
    Simple {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, value_parser = target, default_value = "L")]
        target: Target,
        #[arg(long, default_value_t = SIMPLE_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        zeros_file: Option<PathBuf>,
    },
    /// Horizontal tangents of Gamma' curves lie on zeros of L'.
    Intertwine {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: Window,
    },
    /// Colors alternate along the pre-images of a circle |L| = r.
    Alternation {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_parser = parse::window, allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_parser = parse::positive)]
        radius: f64,
    },
}

enum Outcome {
    Done,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Adds the schema version to a JSON object.
fn document(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn print_json(v: Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &document(v))?;
    writeln!(out)?;
    Ok(())
}

fn write_json(v: Value, path: &Path) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&document(v))?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn emit(v: Value, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => write_json(v, p),
        None => print_json(v),
    }
}

fn character_json(chi: &DirichletCharacter) -> Value {
    let values: Vec<String> = chi
        .roots()
        .iter()
        .map(|r| match r {
            None => "0".to_string(),
            Some(r) if r.num == 0 => "1".to_string(),
            Some(r) => format!("e({}/{})", r.num, r.den),
        })
        .collect();
    json!({
        "q": chi.modulus(),
        "index": chi.index(),
        "conductor": chi.conductor(),
        "primitive": chi.is_primitive(),
        "principal": chi.is_principal(),
        "real": chi.is_real(),
        "parity": chi.parity(),
        "order": chi.order(),
        "values": values,
    })
}

fn verdict(summary: &VerificationSummary) -> anyhow::Result<Outcome> {
    print_json(serde_json::to_value(summary)?)?;
    Ok(if summary.status.is_pass() {
        Outcome::Done
    } else {
        Outcome::Failed
    })
}

fn curve_summary(c: &CurveComponent) -> Value {
    json!({
        "kind": c.kind.as_str(),
        "anchor": c.anchor,
        "vertices": c.len(),
        "ends": c.ends,
        "closed": c.closed,
        "branch_points": c.branch_points,
        "first": c.vertices.first(),
        "last": c.vertices.last(),
    })
}

fn write_csv(curves: &[CurveComponent], path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["component_id", "kind", "vertex_index", "re", "im", "color"])?;
    for (id, c) in curves.iter().enumerate() {
        for (k, (v, color)) in c.vertices.iter().zip(&c.colors).enumerate() {
            let color = if *color >= 0 { "pos" } else { "neg" };
            w.write_record([
                id.to_string(),
                c.kind.as_str().to_string(),
                k.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                color.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn window_json(w: &Window) -> Value {
    json!([w.sigma_min, w.sigma_max, w.t_min, w.t_max])
}

fn load_zeros(path: &Path, chi: &DirichletCharacter, target: Target) -> anyhow::Result<Vec<Zero>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match doc.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => bail!("{}: unsupported schema_version {other:?}", path.display()),
    }
    let records: Vec<ZeroRecord> = serde_json::from_value(doc.get("zeros").cloned().unwrap_or(Value::Null))
        .with_context(|| format!("{}: expected a \"zeros\" array of records", path.display()))?;
    if let Some(r) = records.iter().find(|r| r.q != chi.modulus() || r.index != chi.index()) {
        bail!(
            "{}: record for q = {}, index {} does not match the requested character",
            path.display(),
            r.q,
            r.index
        );
    }
    Ok(records.iter().map(|r| Zero::from_record(r, target)).collect())
}

fn zeros_for(chi: &DirichletCharacter, t_max: f64, target: Target, file: Option<&Path>) -> anyhow::Result<Vec<Zero>> {
    match file {
        Some(p) => load_zeros(p, chi, target),
        None => Ok(find_zeros(chi, 0.0, t_max, target)?),
    }
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Chars { modulus, json } => {
            if modulus == 0 {
                bail!("modulus must be at least 1");
            }
            let chars = enumerate_characters(modulus);
            if json {
                let list: Vec<Value> = chars.iter().map(character_json).collect();
                print_json(json!({ "q": modulus, "characters": list }))?;
            } else {
                println!("{:>5} {:>9} {:>6} {:>5} {:>9}  values at 0..q-1", "index", "conductor", "parity", "order", "primitive");
                for chi in &chars {
                    let v = character_json(chi);
                    let values: Vec<&str> = v["values"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
                    println!(
                        "{:>5} {:>9} {:>6} {:>5} {:>9}  {}",
                        chi.index(),
                        chi.conductor(),
                        chi.parity(),
                        chi.order(),
                        chi.is_primitive(),
                        values.join(" ")
                    );
                }
            }
        }
        Command::Eval { chi, s, target } => {
            let c = chi.character()?;
            let r = match target {
                Target::L => eval(&c, s)?,
                Target::LPrime => eval_derivative(&c, s)?,
            };
            print_json(json!({
                "q": c.modulus(),
                "index": c.index(),
                "target": target,
                "s": s,
                "value": r.value,
                "est_error": r.est_error,
                "method": r.method,
            }))?;
        }
        Command::Zeros { chi, t_min, t_max, target, output } => {
            let c = chi.character()?;
            let zs = find_zeros(&c, t_min, t_max, target)?;
            let records: Vec<ZeroRecord> = zs.iter().map(Zero::record).collect();
            emit(
                json!({
                    "q": c.modulus(),
                    "index": c.index(),
                    "target": target,
                    "t_min": t_min,
                    "t_max": t_max,
                    "zeros": records,
                }),
                output.as_deref(),
            )?;
        }
        Command::TrivialZeros { chi, count } => {
            let c = chi.character()?;
            let records: Vec<ZeroRecord> = trivial_zeros(&c, count).iter().map(Zero::record).collect();
            print_json(json!({ "q": c.modulus(), "index": c.index(), "zeros": records }))?;
        }
        Command::Trace { chi, window, seed, target, csv } => {
            let c = chi.character()?;
            let curves = match seed {
                Some(s) => vec![trace_real_preimage(&c, s, target, window)?],
                None => real_preimage_components(&c, target, window)?,
            };
            if let Some(p) = &csv {
                write_csv(&curves, p)?;
            }
            print_json(json!({
                "q": c.modulus(),
                "index": c.index(),
                "target": target,
                "window": window_json(&window),
                "components": curves.iter().map(curve_summary).collect::<Vec<_>>(),
                "csv": csv,
            }))?;
        }
        Command::Strips { chi, window } => {
            let c = chi.character()?;
            let strips = find_strips(&c, window)?;
            let list: Vec<Value> = strips
                .iter()
                .map(|s| {
                    let domains = if s.complete {
                        match fundamental_domains(&c, s, window) {
                            Ok(d) => json!(d.len()),
                            Err(e) => json!(e.to_string()),
                        }
                    } else {
                        Value::Null
                    };
                    json!({
                        "complete": s.complete,
                        "lower_boundary": curve_summary(&s.lower_boundary),
                        "upper_boundary": curve_summary(&s.upper_boundary),
                        "zeros": s.zeros_inside.iter().map(Zero::record).collect::<Vec<_>>(),
                        "branch_points": s.branch_points_inside.iter().map(|z| z.location).collect::<Vec<_>>(),
                        "gamma_zero_curves": s.gamma_zero_count(),
                        "domains": domains,
                    })
                })
                .collect();
            print_json(json!({
                "q": c.modulus(),
                "index": c.index(),
                "window": window_json(&window),
                "strips": list,
            }))?;
        }
        Command::Domains { chi, window } => {
            let c = chi.character()?;
            let strips = find_strips(&c, window)?;
            let mut list = Vec::new();
            for s in strips.iter().filter(|s| s.complete) {
                let ds = fundamental_domains(&c, s, window)?;
                list.push(json!({
                    "zeros": s.zeros_inside.iter().map(|z| z.location).collect::<Vec<_>>(),
                    "branch_points": s.branch_points_inside.iter().map(|z| z.location).collect::<Vec<_>>(),
                    "domains": ds.iter().map(|d| json!({
                        "witness": d.witness,
                        "zeros": d.zeros_inside,
                        "area_cells": d.area_cells,
                        "samples": d.samples,
                        "min_image_separation": d.min_image_separation,
                        "injective": d.injective,
                        "boundary": d.boundary.iter().map(|b| b.kind.as_str()).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                }));
            }
            print_json(json!({
                "q": c.modulus(),
                "index": c.index(),
                "window": window_json(&window),
                "strips": list,
            }))?;
        }
        Command::Render { chi, window, size, style, target, overlay, rotate: turn, output } => {
            let c = chi.character()?;
            let (w, h) = size;
            let mut img = match style {
                Style::TwoColor => render_two_color(&c, window, w, h, target)?,
                Style::Mesh => render_mesh(&c, window, w, h, &ColorScheme::mesh(), target)?,
            };
            if overlay {
                let curves = real_preimage_components(&c, target, window)?;
                let zeros: Vec<Zero> = find_zeros(&c, window.t_min, window.t_max, target)?
                    .into_iter()
                    .filter(|z| window.contains(z.location, 0.0))
                    .collect();
                img = overlay_curves(&img, &curves, &zeros, OverlayStyle::default());
            }
            if turn {
                img = rotate(&img);
            }
            write_ppm(&img, &output)?;
            print_json(json!({
                "q": c.modulus(),
                "index": c.index(),
                "output": output,
                "width": img.width,
                "height": img.height,
                "window": window_json(&window),
            }))?;
        }
        Command::Verify { check } => return verify(check),
        Command::Suite { q_max, t_max, seed, output } => {
            let summaries = report_suite(q_max, t_max, seed)?;
            let failed = summaries.iter().filter(|s| !s.status.is_pass()).count();
            emit(
                json!({
                    "q_max": q_max,
                    "t_max": t_max,
                    "seed": seed,
                    "status": if failed == 0 { "PASS" } else { "FAIL" },
                    "failed": failed,
                    "summaries": summaries,
                }),
                output.as_deref(),
            )?;
            if failed > 0 {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn verify(check: Verify) -> anyhow::Result<Outcome> {
    match check {
        Verify::Fe { chi, seed, points } => {
            let c = chi.character()?;
            if !c.is_primitive() {
                bail!("the functional equation needs a primitive character (conductor {})", c.conductor());
            }
            verdict(&check_functional_equation(&c, &random_points(seed, points, (-2.0, 3.0), (-30.0, 30.0))))
        }
        Verify::Conj { chi, seed, points } => {
            let c = chi.character()?;
            verdict(&check_conjugation(&c, &random_points(seed, points, (-2.0, 3.0), (-30.0, 30.0))))
        }
        Verify::Factor { chi } => verdict(&check_factorization(&chi.character()?, &factorization_grid())),
        Verify::Rh { chi, t_max, tol, zeros_file } => {
            let c = chi.character()?;
            let zs = zeros_for(&c, t_max, Target::L, zeros_file.as_deref())?;
            let pair = if zeros_file.is_none() { Some(&c) } else { None };
            verdict(&verify_rh(&zs, tol, pair))
        }
        Verify::Simple { chi, t_max, target, threshold, zeros_file } => {
            let c = chi.character()?;
            let zs = zeros_for(&c, t_max, target, zeros_file.as_deref())?;
            verdict(&verify_simple(&zs, threshold))
        }
        Verify::Intertwine { chi, window } => verdict(&check_intertwining_all(&chi.character()?, window)),
        Verify::Alternation { chi, window, radius } => {
            let c = chi.character()?;
            let comps = circle_preimage(&c, radius, window)?;
            let results: Vec<VerificationSummary> = comps.iter().map(check_color_alternation).collect();
            let failed = results.iter().filter(|r| !r.status.is_pass()).count();
            let parts: Vec<Value> = comps
                .iter()
                .zip(&results)
                .map(|(comp, r)| {
                    json!({
                        "status": r.status,
                        "closed": comp.closed,
                        "ends": comp.ends,
                        "vertices": comp.len(),
                        "crossings": r.count,
                        "detail": r.detail,
                    })
                })
                .collect();
            let mut s = VerificationSummary::upper_bound(
                "alternation",
                failed as f64,
                None,
                0.5,
                comps.len(),
                json!({
                    "q": c.modulus(),
                    "index": c.index(),
                    "radius": radius,
                    "window": window_json(&window),
                    "components": parts,
                }),
            );
            if failed > 0 {
                s = s.with_detail(format!("{failed} of {} components do not alternate", comps.len()));
            }
            verdict(&s)
        }
    }
}
