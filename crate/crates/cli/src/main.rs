mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use maxcsp_core::certificate::{verify_transformation, VerificationReport};
use maxcsp_core::classify::classify_language;
use maxcsp_core::constraint::format_bits;
use maxcsp_core::express::decompose;
use maxcsp_core::implementation::{explain_failure, implement, SearchCaps};
use maxcsp_core::oracle::{self, DEFAULT_ORACLE_CAP};
use maxcsp_core::poly::{characteristic_polynomial, degree_of_language};
use maxcsp_core::random::{self, InstanceSpec};
use maxcsp_core::transform::{self, TransformOutput};
use maxcsp_core::{catalog, io, ConstraintLanguage, Formula, WeightRange};

#[derive(Parser)]
#[command(name = "maxcsp", version, about = "Boolean Max CSP polynomials, implementations and kernels")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Auxiliary variable cap for implementation search.
    #[arg(long, global = true, default_value_t = SearchCaps::default().max_aux)]
    max_aux: usize,
    /// Application cap for implementation search.
    #[arg(long, global = true, default_value_t = SearchCaps::default().max_apps)]
    max_apps: usize,
    /// Largest variable count the exhaustive oracle accepts.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,
    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Extra language files or specs used to resolve constraint names in inputs.
    #[arg(long = "lang", global = true)]
    langs: Vec<String>,
}

impl Global {
    fn caps(&self) -> SearchCaps {
        SearchCaps {
            max_aux: self.max_aux,
            max_apps: self.max_apps,
            ..SearchCaps::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dichotomy verdict for a language.
    Classify {
        language: String,
        /// Also list the flags of every member.
        #[arg(long)]
        verbose: bool,
    },
    /// Maximum characteristic-polynomial degree of a language.
    Degree { language: String },
    /// Characteristic polynomial of every member.
    Poly { language: String },
    /// Writes a target polynomial as a combination of substitutions into a base constraint.
    Decompose {
        /// Base constraint name, e.g. `EX3`.
        #[arg(long)]
        base: String,
        /// Target constraint name, e.g. `OR3[x1,x2,~x3]`.
        #[arg(long, conflicts_with = "polynomial")]
        target: Option<String>,
        /// Target polynomial listing.
        #[arg(long)]
        polynomial: Option<PathBuf>,
    },
    /// Searches for a strict implementation of a target constraint.
    Implement { language: String, target: String },
    /// Applies one transformation to an instance.
    Transform {
        kind: Kind,
        instance: PathBuf,
        /// Source language, for `apply-poly` and the chains.
        #[arg(long)]
        from: Option<String>,
        /// Target language.
        #[arg(long)]
        to: Option<String>,
        /// Cross-check the result with the oracle and fail if it does not hold.
        #[arg(long)]
        verify: bool,
    },
    /// Kernel of an instance over a language, with range N.
    Kernelize {
        instance: PathBuf,
        #[arg(long)]
        to: String,
        #[arg(long)]
        verify: bool,
    },
    /// Polynomial listing of an instance, constant term folded into the threshold.
    Compress { instance: PathBuf },
    /// Exact optimum and both decisions at the instance threshold.
    Solve { instance: PathBuf },
    /// Checks a transform output and its certificate against the input.
    Verify { input: PathBuf, transformed: PathBuf },
    /// Max 2-SAT instance deciding whether a graph has a vertex cover of size k.
    VcReduce {
        graph: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// Seeded random instance.
    Generate {
        language: String,
        #[arg(long)]
        nvars: usize,
        #[arg(long)]
        apps: usize,
        #[arg(long, value_enum, default_value_t = Range::Z)]
        range: Range,
        #[arg(long, default_value_t = 10)]
        max_weight: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed threshold; otherwise one is picked near the optimum.
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<BigInt>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    NegToBase,
    SignedToUnsigned,
    ApplyPoly,
    ImplementTf,
    UnsignedLit,
    ImplementLit,
    Additive,
    Linear,
    Cycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Range {
    N,
    Z,
}

struct Ctx {
    global: Global,
    extra: Vec<ConstraintLanguage>,
}

impl Ctx {
    fn read(&self, path: &PathBuf) -> Result<String> {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }

    fn instance(&self, path: &PathBuf, also: &[&ConstraintLanguage]) -> Result<Formula> {
        let text = self.read(path)?;
        let mut langs: Vec<&ConstraintLanguage> = also.to_vec();
        langs.extend(self.extra.iter());
        io::parse_instance(&text, &langs).with_context(|| format!("parsing {}", path.display()))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.global.output {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn check(&self, phi: &Formula, out: &TransformOutput) -> Result<()> {
        let report = verify_transformation(phi, &out.formula, &out.certificate, self.global.oracle_cap)?;
        eprint!("{report}");
        if !report.passed() {
            bail!("verification failed");
        }
        Ok(())
    }
}

fn required(arg: &Option<String>, flag: &str, kind: &str) -> Result<ConstraintLanguage> {
    let s = arg.as_deref().ok_or_else(|| anyhow!("`{kind}` needs --{flag}"))?;
    spec::language(s)
}

fn transformed(out: &TransformOutput) -> String {
    io::emit_instance(&out.formula) + &io::emit_certificate(&out.certificate)
}

fn table(report: &VerificationReport) -> String {
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    format!("{report}result {verdict}\n")
}

fn run(cli: Cli) -> Result<bool> {
    let extra = cli.global.langs.iter().map(|s| spec::language(s)).collect::<Result<Vec<_>>>()?;
    let ctx = Ctx { global: cli.global, extra };
    let caps = ctx.global.caps();
    let cap = ctx.global.oracle_cap;
    match cli.command {
        Command::Classify { language, verbose } => {
            let report = classify_language(&spec::language(&language)?);
            let mut out = format!("{}\n", report.summary());
            if verbose {
                for (name, flags) in &report.per_constraint {
                    out.push_str(&format!("{name} {flags}\n"));
                }
            }
            ctx.emit(&out)?;
        }
        Command::Degree { language } => {
            ctx.emit(&format!("{}\n", degree_of_language(&spec::language(&language)?)?))?;
        }
        Command::Poly { language } => {
            let l = spec::language(&language)?;
            let mut out = String::new();
            for c in l.iter() {
                out.push_str(&format!("{}: {}\n", c.name(), characteristic_polynomial(c)?));
            }
            ctx.emit(&out)?;
        }
        Command::Decompose { base, target, polynomial } => {
            let langs: Vec<&ConstraintLanguage> = ctx.extra.iter().collect();
            let base = catalog::resolve(&base, &langs)?;
            let p = match (target, polynomial) {
                (Some(t), _) => characteristic_polynomial(&*catalog::resolve(&t, &langs)?)?,
                (None, Some(path)) => io::parse_polynomial(&ctx.read(&path)?)?.polynomial,
                (None, None) => bail!("decompose needs --target or --polynomial"),
            };
            let lc = decompose(&p, &base)?;
            ctx.emit(&io::emit_combination(&lc))?;
        }
        Command::Implement { language, target } => {
            let l = spec::language(&language)?;
            let mut langs: Vec<&ConstraintLanguage> = vec![&l];
            langs.extend(ctx.extra.iter());
            let t = catalog::resolve(&target, &langs)?;
            match implement(&l, &t, caps)? {
                Some(imp) => ctx.emit(&io::emit_implementation(&imp))?,
                None => bail!("{}", explain_failure(&l, &t, caps)),
            }
        }
        Command::Transform { kind, instance, from, to, verify } => {
            let from_l = from.as_deref().map(spec::language).transpose()?;
            let also: Vec<&ConstraintLanguage> = from_l.iter().collect();
            let phi = ctx.instance(&instance, &also)?;
            let source = || from_l.clone().ok_or_else(|| anyhow!("this transform needs --from"));
            let out = match kind {
                Kind::NegToBase => transform::neg_to_base(&phi, &required(&to, "to", "neg-to-base")?)?,
                Kind::SignedToUnsigned => transform::signed_to_unsigned_neg(&phi)?,
                Kind::ApplyPoly => transform::apply_poly(&phi, &source()?, &required(&to, "to", "apply-poly")?)?,
                Kind::ImplementTf => transform::implement_tf(&phi, &required(&to, "to", "implement-tf")?, caps)?,
                Kind::UnsignedLit => transform::unsigned_lit(&phi)?,
                Kind::ImplementLit => transform::implement_lit(&phi, &required(&to, "to", "implement-lit")?, caps)?,
                Kind::Additive => transform::additive_chain(&phi, &source()?, &required(&to, "to", "additive")?, caps)?,
                Kind::Linear => transform::linear_chain(&phi, &source()?, &required(&to, "to", "linear")?, caps)?,
                Kind::Cycle => transform::reduction_cycle(&phi, caps)?.output,
            };
            if verify {
                ctx.check(&phi, &out)?;
            }
            ctx.emit(&transformed(&out))?;
        }
        Command::Kernelize { instance, to, verify } => {
            let l = spec::language(&to)?;
            let phi = ctx.instance(&instance, &[&l])?;
            let (out, rep) = transform::kernelize(&phi, &l, caps, cap)?;
            eprintln!(
                "monomials {} kernel_nvars {} kernel_size {} max_weight_bits {} total_bits {}",
                rep.monomials, rep.kernel_nvars, rep.kernel_size, rep.max_weight_bits, rep.total_bits
            );
            if verify {
                ctx.check(&phi, &out)?;
            }
            ctx.emit(&transformed(&out))?;
        }
        Command::Compress { instance } => {
            let phi = ctx.instance(&instance, &[])?;
            let (p, t) = transform::compress_to_polynomial(&phi)?;
            ctx.emit(&io::emit_polynomial(&p, Some(&t)))?;
        }
        Command::Solve { instance } => {
            let phi = ctx.instance(&instance, &[])?;
            let r = oracle::brute_force_capped(&phi, cap)?;
            let eq = oracle::decide_exact_capped(&phi, &phi.threshold, cap)?;
            let yn = |b: bool| if b { "yes" } else { "no" };
            ctx.emit(&format!(
                "optimum {}\nwitness {}\ngeq {}\neq {}\n",
                r.optimum,
                format_bits(&r.witness),
                yn(r.decision(&phi.threshold)),
                yn(eq)
            ))?;
        }
        Command::Verify { input, transformed } => {
            let phi = ctx.instance(&input, &[])?;
            let langs: Vec<&ConstraintLanguage> = ctx.extra.iter().collect();
            let (psi, cert) = io::parse_output(&ctx.read(&transformed)?, &langs).with_context(|| format!("parsing {}", transformed.display()))?;
            let cert = cert.ok_or_else(|| anyhow!("{} has no certificate block", transformed.display()))?;
            let report = verify_transformation(&phi, &psi, &cert, cap)?;
            ctx.emit(&table(&report))?;
            return Ok(report.passed());
        }
        Command::VcReduce { graph, k } => {
            let g = io::parse_graph(&ctx.read(&graph)?)?;
            ctx.emit(&io::emit_instance(&transform::vc_reduce(&g, k)?))?;
        }
        Command::Generate { language, nvars, apps, range, max_weight, seed, threshold } => {
            let l = spec::language(&language)?;
            let spec = InstanceSpec {
                nvars,
                applications: apps,
                weight_range: match range {
                    Range::N => WeightRange::N,
                    Range::Z => WeightRange::Z,
                },
                max_weight,
            };
            let mut rng = random::rng(seed);
            let phi = match threshold {
                Some(t) => random::random_formula(&mut rng, &l, spec)?.with_threshold(t),
                None => random::random_instance(&mut rng, &l, spec, cap)?,
            };
            ctx.emit(&io::emit_instance(&phi))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
