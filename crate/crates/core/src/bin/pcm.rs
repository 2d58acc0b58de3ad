use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use pcm::fatou::{components, raster_itineraries};
use pcm::kleinian::{alpha_limit_probe, limit_set_approx, omega_limit_probe, schottky_check};
use pcm::piecewise::sphere_samples;
use pcm::prediscontinuity::{pd_partial, DEFAULT_ARC_BUDGET};
use pcm::render::{component_report, configure_threads, render_with_budget, ComponentTable};
use pcm::scene::SceneConfig;
use pcm::sphere::{Moebius, SpherePoint};
use pcm::stability::{continuity_probe, structural_stability_probe, DeformationSpec, StabilityParams};
use pcm::verify::verify;
use pcm::{gallery, Error};

// A closed stdout (as in `pcm render ... | head`) ends the program quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout().lock(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            return Err(Error::from(e));
        }
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        out!($($t)*);
        out!("\n");
    }};
}

#[derive(Parser)]
#[command(name = "pcm", version, about = "Piecewise conformal maps on the Riemann sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a scene to a binary PPM and print its component report.
    Render {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Resolution as WxH.
        #[arg(long, value_parser = parse_res)]
        res: Option<(usize, usize)>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        prefix: Option<usize>,
        /// Largest number of arcs per stratum in the overlay.
        #[arg(long, default_value_t = DEFAULT_ARC_BUDGET)]
        arc_budget: usize,
    },
    /// List the built-in scenes, or print one as JSON.
    Gallery {
        #[arg(long)]
        list: bool,
        name: Option<String>,
    },
    /// Run a probe and print its table.
    Probe {
        kind: ProbeKind,
        #[command(flatten)]
        scene: SceneArg,
        #[command(flatten)]
        opts: ProbeOpts,
    },
    /// Check the invariants of a scene.
    Verify {
        #[command(flatten)]
        scene: SceneArg,
    },
    /// Write strata, components or a limit set as line-delimited text.
    Export {
        kind: ExportKind,
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 8)]
        word_len: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeKind {
    Alpha,
    Omega,
    Continuity,
    Schottky,
    Stability,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Strata,
    Components,
    Limit,
}

#[derive(Args)]
struct SceneArg {
    /// Scene file.
    #[arg(required_unless_present = "gallery")]
    path: Option<PathBuf>,
    /// Built-in scene instead of a file.
    #[arg(long, conflicts_with = "path")]
    gallery: Option<String>,
}

#[derive(Args)]
struct ProbeOpts {
    /// Levels of the α table.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
    levels: Vec<usize>,
    /// Word length of the limit-set approximation.
    #[arg(long, default_value_t = 8)]
    word_len: usize,
    /// Seeds for the ω probe, spread over the sphere.
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    #[arg(long, default_value_t = 2000)]
    iterations: usize,
    /// Deformation parameters for the continuity probe.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    schedule: Vec<f64>,
    /// Radius change per unit parameter.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    radius_rate: f64,
    /// Center change per unit parameter, as re,im.
    #[arg(long, value_delimiter = ',', default_value = "0,0", allow_hyphen_values = true)]
    center_rate: Vec<f64>,
    /// Stratum level for the continuity probe.
    #[arg(long, default_value_t = 8)]
    level: usize,
    /// Second scene for the stability probe.
    #[arg(long)]
    against: Option<PathBuf>,
    #[arg(long)]
    against_gallery: Option<String>,
}

fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    Ok((w.parse().map_err(|_| "bad width")?, h.parse().map_err(|_| "bad height")?))
}

fn load(path: Option<&PathBuf>, name: Option<&str>) -> Result<SceneConfig, Error> {
    match (path, name) {
        (_, Some(n)) => gallery::gallery(n),
        (Some(p), None) => SceneConfig::load(p),
        (None, None) => Err(Error::Validation { invariant: "scene", detail: "no scene given".into() }),
    }
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Truncated { .. } => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Render { scene, out, res, depth, prefix, arc_budget } => {
            let scene = load(scene.path.as_ref(), scene.gallery.as_deref())?.with_settings(res, depth, prefix)?;
            let r = render_with_budget(&scene, arc_budget)?;
            let out = out
                .unwrap_or_else(|| PathBuf::from(scene.output().map_or(format!("{}.ppm", scene.name()), String::from)));
            r.image.write_ppm(&out)?;
            eprintln!(
                "wrote {} ({}x{}, {} arcs over {} levels)",
                out.display(),
                r.image.width(),
                r.image.height(),
                r.arcs,
                r.levels
            );
            out!("{}", ComponentTable(&r.components));
            if let Some(e) = r.truncated {
                eprintln!("warning: overlay incomplete: {e}");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gallery { list, name } => {
            match (list, name) {
                (_, Some(n)) => out!("{}", gallery::gallery(&n)?.to_json()),
                _ => {
                    for (name, description) in gallery::list() {
                        outln!("{name:<22} {description}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Probe { kind, scene, opts } => {
            let scene = load(scene.path.as_ref(), scene.gallery.as_deref())?;
            probe(kind, &scene, &opts)
        }
        Command::Verify { scene } => {
            let scene = load(scene.path.as_ref(), scene.gallery.as_deref())?;
            let report = verify(&scene)?;
            out!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Export { kind, scene, depth, word_len } => {
            let scene = load(scene.path.as_ref(), scene.gallery.as_deref())?;
            let f = scene.map();
            match kind {
                ExportKind::Strata => {
                    let (strata, err) = pd_partial(f, depth.unwrap_or(scene.depth()), DEFAULT_ARC_BUDGET);
                    out!("{}", strata.export());
                    if let Some(e) = err {
                        return Err(e);
                    }
                }
                ExportKind::Components => {
                    let (w, h) = scene.resolution();
                    let grid = raster_itineraries(f, scene.viewport(), w, h, scene.prefix())?;
                    let comps = components(&grid);
                    out!("{}", ComponentTable(&component_report(f, &grid, &comps)));
                }
                ExportKind::Limit => {
                    let limit = limit_set_approx(f.branches(), word_len, 1e-9)?;
                    out!("{}", limit.export());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn probe(kind: ProbeKind, scene: &SceneConfig, opts: &ProbeOpts) -> Result<ExitCode, Error> {
    let f = scene.map();
    match kind {
        ProbeKind::Alpha => out!("{}", alpha_limit_probe(f, &opts.levels, opts.word_len)?),
        ProbeKind::Omega => {
            out!("{}", omega_limit_probe(f, &sphere_samples(opts.seeds), opts.iterations, opts.word_len)?)
        }
        ProbeKind::Continuity => {
            let (center, radius, branches) = disc_scene(scene)?;
            let rate = match opts.center_rate.as_slice() {
                [re, im] => Complex64::new(*re, *im),
                _ => return Err(Error::Validation { invariant: "center rate", detail: "expected re,im".into() }),
            };
            let spec = DeformationSpec {
                center,
                radius,
                center_rate: rate,
                radius_rate: opts.radius_rate,
                schedule: opts.schedule.clone(),
            };
            out!("{}", continuity_probe(&branches[0], &branches[1], &spec, opts.level)?);
        }
        ProbeKind::Schottky => {
            let circles = f.partition().boundary_circles();
            let [a, b] = f.branches() else {
                return Err(Error::Validation {
                    invariant: "two branches",
                    detail: "the Schottky check pairs two maps".into(),
                });
            };
            match schottky_check(a, b, circles.first()) {
                None => outln!("# no Schottky pairing: isometric circles of f and g are not pairwise disjoint"),
                Some(p) => {
                    outln!("# Schottky pairing found");
                    outln!("{:>6} {:>15} {:>15} {:>12}", "circle", "center_re", "center_im", "radius");
                    for (k, c) in p.circles.iter().enumerate() {
                        if let Some((z, r)) = c.center_radius() {
                            outln!("{:>6} {:>15.8} {:>15.8} {:>12.8}", k, z.re, z.im, r);
                        }
                    }
                    let verdict = match p.boundary_in_fundamental_region {
                        Some(true) => "yes",
                        Some(false) => "no",
                        None => "not applicable",
                    };
                    outln!("# boundary in fundamental region: {verdict}");
                }
            }
        }
        ProbeKind::Stability => {
            let other =
                load(opts.against.as_ref(), opts.against_gallery.as_deref()).map_err(|_| Error::Validation {
                    invariant: "second scene",
                    detail: "the stability probe needs --against FILE or --against-gallery NAME".into(),
                })?;
            let (width, height) = scene.resolution();
            let params = StabilityParams {
                viewport: scene.viewport(),
                width,
                height,
                prefix: scene.prefix(),
                depth: scene.depth(),
            };
            out!("{}", structural_stability_probe(f, other.map(), &params)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

// Center, radius and branches of a scene made of one disc and its
// complement.
fn disc_scene(scene: &SceneConfig) -> Result<(Complex64, f64, Vec<Moebius>), Error> {
    let f = scene.map();
    let regions = f.partition().regions();
    let bad = || Error::Validation {
        invariant: "disc scene",
        detail: "the continuity probe needs region 0 a disc and region 1 its complement".into(),
    };
    if regions.len() != 2 || regions[0].constraints().len() != 1 {
        return Err(bad());
    }
    let (c, side) = regions[0].constraints()[0];
    let (center, radius) = c.center_radius().ok_or_else(bad)?;
    if !side.holds(c.form(SpherePoint::Finite(center))) {
        return Err(bad());
    }
    Ok((center, radius, f.branches().to_vec()))
}
