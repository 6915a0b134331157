//! `berkring`: norms, spectra, rational domains, coverings and Tate checks
//! from the command line.

mod input;

use std::fmt::Write as _;
use std::process::ExitCode;

use berkring::affinoid::{domain_membership, AffinoidPresentation};
use berkring::base::{gauss_poly_norm, l1_poly_norm, BaseRing};
use berkring::coverings::{
    check_is_covering, check_refinement, check_surviving, laurent_covering, refine_rational_to_laurent,
    refine_units_to_laurent, standard_covering, Covering,
};
use berkring::spectrum::{emit_profile, sample_spectrum, spectral_norm, BranchSpec};
use berkring::tate::{cech_complex, check_exactness, DEFAULT_DEGREE_BOUND};
use berkring::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "berkring", version, about = "Seminormed rings, spectra and rational coverings")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sampling.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Ring {
    /// Z_arch, Z_triv or Q_triv.
    #[arg(long)]
    base: Option<String>,
    /// Polyradius entries VAR=RHO.
    #[arg(long = "rho")]
    rho: Vec<String>,
}

#[derive(Args)]
struct Space {
    #[command(flatten)]
    ring: Ring,
    /// JSON file, or text such as "Q[T]" or "Z[T,S]/(S^2-T)".
    #[arg(long)]
    algebra: Option<String>,
    /// Sampling density as JSON.
    #[arg(long)]
    density: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// ℓ¹ or Gauss norm of a polynomial.
    Norm {
        #[command(flatten)]
        ring: Ring,
        #[arg(long, conflicts_with = "gauss")]
        l1: bool,
        #[arg(long)]
        gauss: bool,
        expr: String,
    },
    /// Spectral seminorm on the polydisc.
    Spectral {
        #[command(flatten)]
        ring: Ring,
        expr: String,
    },
    /// Sampled points of the spectrum of an algebra.
    SpectrumSample {
        #[command(flatten)]
        space: Space,
    },
    /// Membership of points in a rational domain.
    DomainMember {
        #[command(flatten)]
        space: Space,
        /// Domain pairs EXPR:RHO, f₀ first.
        #[arg(long = "pair")]
        pairs: Vec<String>,
        /// Domain spec as JSON, instead of --pair.
        #[arg(long)]
        domain: Option<String>,
        /// A point as JSON; the sampled spectrum when absent.
        #[arg(long)]
        point: Option<String>,
    },
    /// Standard covering generated by EXPR:RHO pairs.
    CoverStandard {
        #[command(flatten)]
        space: Space,
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
    },
    /// Laurent covering generated by EXPR:RHO pairs.
    CoverLaurent {
        #[command(flatten)]
        space: Space,
        #[arg(long = "gen")]
        gens: Vec<String>,
    },
    /// Refine a standard covering to a Laurent covering.
    CoverRefine {
        #[command(flatten)]
        space: Space,
        #[arg(long = "gen", required = true)]
        gens: Vec<String>,
        /// Use the units lemma with one witness per generator:
        /// inverse:EXPR, var:NAME or -.
        #[arg(long = "witness")]
        witnesses: Vec<String>,
        #[arg(long)]
        units: bool,
    },
    /// Check a covering, or a refinement, on sampled points.
    CoverCheck {
        #[command(flatten)]
        space: Space,
        /// Covering JSON file.
        #[arg(long)]
        covering: Option<String>,
        /// Build the covering from these pairs instead.
        #[arg(long = "gen")]
        gens: Vec<String>,
        #[arg(long, value_enum, default_value_t = Kind::Standard)]
        kind: Kind,
        /// Covering JSON that the checked covering should refine.
        #[arg(long)]
        coarse: Option<String>,
    },
    /// Exactness of the Čech complex of a covering over Q_triv.
    TateCheck {
        #[command(flatten)]
        space: Space,
        /// Laurent generators EXPR or EXPR:RHO.
        #[arg(long = "laurent")]
        laurent: Vec<String>,
        /// Standard generators, instead of --laurent.
        #[arg(long = "standard")]
        standard: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree: u32,
        /// Remove one member and its intersections before checking.
        #[arg(long)]
        drop: Option<usize>,
    },
    /// |f| along a branch: padic(p), archimedean or torus(eps).
    Plot {
        #[command(flatten)]
        ring: Ring,
        #[arg(long)]
        branch: String,
        /// Comma-separated parameters.
        #[arg(long, conflicts_with = "points")]
        grid: Option<String>,
        /// Size of the default grid.
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Also write an SVG plot here.
        #[arg(long)]
        svg: Option<String>,
        expr: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Standard,
    Laurent,
}

struct Output {
    ok: bool,
    json: Value,
    csv: Option<String>,
}

impl Output {
    fn ok(json: Value) -> Self {
        Output { ok: true, json, csv: None }
    }

    fn csv(mut self, table: String) -> Self {
        self.csv = Some(table);
        self
    }
}

fn base_of(r: &Ring) -> Result<Option<BaseRing>> {
    r.base.as_deref().map(str::parse).transpose()
}

fn required_base(r: &Ring) -> Result<BaseRing> {
    base_of(r)?.ok_or_else(|| Error::Invalid("--base is required".into()))
}

fn space(s: &Space) -> Result<AffinoidPresentation> {
    input::algebra(s.algebra.as_deref(), base_of(&s.ring)?, &input::radii(&s.ring.rho)?)
}

fn real_json(v: &berkring::Real) -> Value {
    match v.exact() {
        Some(q) => json!({ "exact": q.to_string(), "approx": v.to_f64() }),
        None => json!({ "approx": v.to_f64() }),
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Norm { ring, gauss, expr, .. } => {
            let f = input::poly(expr)?;
            let base = required_base(ring)?;
            let radii = input::radii(&ring.rho)?;
            let (name, v) = if *gauss {
                ("gauss", gauss_poly_norm(&f, &radii, base)?)
            } else {
                ("l1", l1_poly_norm(&f, &radii, base)?)
            };
            Ok(Output::ok(json!({ "norm": name, "value": v.to_string() })).csv(format!("norm,value\n{name},{v}\n")))
        }
        Command::Spectral { ring, expr } => {
            let f = input::poly(expr)?;
            let s = spectral_norm(&f, &input::radii(&ring.rho)?, required_base(ring)?)?;
            let shown = format!("{:.6}", s.value.to_f64());
            Ok(Output::ok(json!({
                "value": shown,
                "tolerance": s.tolerance,
                "exact": s.value.exact().map(|q| q.to_string()),
                "witness": s.witness.to_string(),
            }))
            .csv(format!("value,tolerance\n{shown},{}\n", s.tolerance)))
        }
        Command::SpectrumSample { space: sp } => {
            let a = space(sp)?;
            let pts = sample_spectrum(&a, &input::density(sp.density.as_deref(), cli.seed)?)?;
            let mut csv = String::from("point\n");
            for x in &pts {
                let _ = writeln!(csv, "{x}");
            }
            Ok(Output::ok(json!({ "count": pts.len(), "points": pts })).csv(csv))
        }
        Command::DomainMember { space: sp, pairs, domain, point } => {
            let a = space(sp)?;
            let d = input::domain(domain.as_deref(), pairs)?;
            let pts = match point {
                Some(p) => vec![input::point(p)?],
                None => sample_spectrum(&a, &input::density(sp.density.as_deref(), cli.seed)?)?,
            };
            let mut rows = Vec::with_capacity(pts.len());
            let mut csv = String::from("point,member\n");
            for x in &pts {
                let m = domain_membership(&a, x, &d)?;
                let _ = writeln!(csv, "{x},{m}");
                rows.push(json!({ "point": x.to_string(), "member": m }));
            }
            let inside = rows.iter().filter(|r| r["member"] == true).count();
            Ok(Output::ok(json!({ "points": pts.len(), "inside": inside, "rows": rows })).csv(csv))
        }
        Command::CoverStandard { space: sp, gens } => {
            let a = space(sp)?;
            let (fs, rhos): (Vec<_>, Vec<_>) = input::pairs(gens)?.into_iter().unzip();
            let c = standard_covering(&a, &fs, &rhos, None)?;
            Ok(Output::ok(serde_json::to_value(&c)?))
        }
        Command::CoverLaurent { space: sp, gens } => {
            let a = space(sp)?;
            let c = laurent_covering(&a, &input::pairs(gens)?)?;
            Ok(Output::ok(serde_json::to_value(&c)?))
        }
        Command::CoverRefine {
            space: sp,
            gens,
            witnesses,
            units,
        } => {
            let a = space(sp)?;
            let (fs, rhos): (Vec<_>, Vec<_>) = input::pairs(gens)?.into_iter().unzip();
            let coarse = standard_covering(&a, &fs, &rhos, None)?;
            let density = input::density(sp.density.as_deref(), cli.seed)?;
            let pts = sample_spectrum(&a, &density)?;
            let mut csv = String::from("member,surviving,verified_points\n");
            if *units {
                let ws = witnesses.iter().map(|w| input::witness(w)).collect::<Result<Vec<_>>>()?;
                let r = refine_units_to_laurent(&coarse, &ws)?;
                let check = check_refinement(&r.laurent, &coarse, &pts)?;
                let table = r.laurent.membership(&pts)?;
                for (v, target) in check.assignment.iter().enumerate() {
                    let n = table.iter().filter(|row| row[v]).count();
                    let t = target.map_or("-".to_string(), |u| u.to_string());
                    let _ = writeln!(csv, "{v},{t},{n}");
                }
                Ok(Output {
                    ok: check.ok,
                    json: json!({
                        "lemma": "units",
                        "ratios": r.ratios,
                        "laurent": r.laurent,
                        "check": check,
                    }),
                    csv: Some(csv),
                })
            } else {
                let r = refine_rational_to_laurent(&coarse, &pts, &density)?;
                let check = check_surviving(&r, &coarse, &pts)?;
                let table = r.laurent.membership(&pts)?;
                for (v, s) in r.surviving.iter().enumerate() {
                    let n = table.iter().filter(|row| row[v]).count();
                    let s: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                    let _ = writeln!(csv, "{v},{},{n}", s.join(" "));
                }
                Ok(Output {
                    ok: check.ok,
                    json: json!({
                        "lemma": "rational",
                        "c": real_json(&r.c),
                        "c_inv": r.c_inv.to_string(),
                        "inf_max": real_json(&r.estimate.value),
                        "retries": r.retries,
                        "surviving": r.surviving,
                        "laurent": r.laurent,
                        "check": check,
                    }),
                    csv: Some(csv),
                })
            }
        }
        Command::CoverCheck {
            space: sp,
            covering,
            gens,
            kind,
            coarse,
        } => {
            let c: Covering = match covering {
                Some(path) => input::covering(path)?,
                None => {
                    let a = space(sp)?;
                    let ps = input::pairs(gens)?;
                    match kind {
                        Kind::Laurent => laurent_covering(&a, &ps)?,
                        Kind::Standard => {
                            let (fs, rhos): (Vec<_>, Vec<_>) = ps.into_iter().unzip();
                            standard_covering(&a, &fs, &rhos, None)?
                        }
                    }
                }
            };
            let pts = sample_spectrum(&c.parent, &input::density(sp.density.as_deref(), cli.seed)?)?;
            match coarse {
                Some(path) => {
                    let r = check_refinement(&c, &input::covering(path)?, &pts)?;
                    Ok(Output {
                        ok: r.ok,
                        json: serde_json::to_value(&r)?,
                        csv: None,
                    })
                }
                None => {
                    let r = check_is_covering(&c, &pts)?;
                    Ok(Output {
                        ok: r.ok,
                        json: serde_json::to_value(&r)?,
                        csv: None,
                    })
                }
            }
        }
        Command::TateCheck {
            space: sp,
            laurent,
            standard,
            degree,
            drop,
        } => {
            let a = space(sp)?;
            let c = if standard.is_empty() {
                laurent_covering(&a, &input::pairs(laurent)?)?
            } else {
                if !laurent.is_empty() {
                    return Err(Error::Invalid("give --laurent or --standard, not both".into()));
                }
                let (fs, rhos): (Vec<_>, Vec<_>) = input::pairs(standard)?.into_iter().unzip();
                standard_covering(&a, &fs, &rhos, None)?
            };
            let mut cx = cech_complex(&c)?;
            if let Some(k) = drop {
                cx = cx.without_member(*k);
            }
            let r = check_exactness(&cx, *degree)?;
            Ok(Output {
                ok: r.is_exact(),
                json: serde_json::to_value(&r)?,
                csv: None,
            })
        }
        Command::Plot {
            ring,
            branch,
            grid,
            points,
            svg,
            expr,
        } => {
            let f = input::poly(expr)?;
            let spec: BranchSpec = branch.parse()?;
            let params = match grid {
                Some(g) => input::grid(g)?,
                None => spec.default_grid(*points),
            };
            let prof = emit_profile(&f, &input::radii(&ring.rho)?, spec, &params)?;
            if let Some(path) = svg {
                std::fs::write(path, prof.to_svg()).map_err(|e| Error::Invalid(format!("cannot write {path}: {e}")))?;
            }
            let rows: Vec<Value> = prof
                .rows
                .iter()
                .map(|(t, v)| json!({ "param": t, "value": v.to_f64() }))
                .collect();
            Ok(Output::ok(json!({ "branch": prof.branch, "rows": rows })).csv(prof.to_csv()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    match run(&cli) {
        Ok(out) => {
            match (cli.format, &out.csv) {
                (Format::Csv, Some(table)) => print!("{table}"),
                _ => println!("{}", serde_json::to_string_pretty(&out.json).expect("json output")),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
