//! The `fai` command line.
//!
//! Exit codes: 0 success, 1 negative answer (not entailed, invalid proof,
//! not provable), 2 usage error, 3 validation or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::RunConfig;
use crate::context::{hasse_dot, ContextClosure, LContext};
use crate::error::{Error, Result};
use crate::fset::AttributeUniverse;
use crate::gconn::{Connection, Parameterization};
use crate::proof::{check_proof_of, parse_proof, prove, render_proof, CheckOptions};
use crate::semantics::{models_enum, Closure, Fai, Theory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fai", version, about = "Fuzzy attribute implications under parameterizations by Galois connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Parameterization file (JSON).
    #[arg(long)]
    params: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Bound on |L|^|Y| (and on the number of intents) for enumerations.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Least model of a theory containing an L-set.
    Closure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        set: String,
    },
    /// Degree to which a theory entails `ANT -> CONS`.
    Entail {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        query: String,
    },
    /// Non-redundant base of a context.
    Base {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Complete set from pseudo-intents (same as `base --complete-only`).
    CompleteSet {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        context: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed points of the context closure.
    Intents {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        context: PathBuf,
        /// Write the Hasse diagram in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Print every intent after the count.
        #[arg(long)]
        list: bool,
    },
    /// All models of a theory.
    Models {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        list: bool,
    },
    /// Verify a proof file against a theory.
    CheckProof {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        proof: PathBuf,
        /// Require the proof to end in this formula.
        #[arg(long)]
        query: Option<String>,
        /// Accept the combined cut/F rule.
        #[arg(long)]
        allow_cutf: bool,
    },
    /// Synthesize a proof of `ANT -> CONS`.
    Prove {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        query: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the parameterization and optional inputs.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long)]
        theory: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct BaseArgs {
    #[arg(long)]
    context: PathBuf,
    /// Stop after the pseudo-intent complete set.
    #[arg(long)]
    complete_only: bool,
    /// Lower antecedent degrees of each rule while it stays true before reducing.
    #[arg(long)]
    strengthen: bool,
    /// Lower degrees on both sides while the theory stays complete.
    #[arg(long)]
    minimize_sides: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Ok,
    Negative,
}

struct Env {
    cfg: RunConfig,
    universe: AttributeUniverse,
    s: Parameterization,
    json: bool,
    cap: u64,
}

impl Env {
    fn load(common: &Common, context: Option<&LContext>, err: &mut dyn Write) -> Result<Env> {
        let cfg = RunConfig::load(&common.params)?;
        Self::with_config(cfg, common, context, err)
    }

    fn with_config(cfg: RunConfig, common: &Common, context: Option<&LContext>, err: &mut dyn Write) -> Result<Env> {
        let universe = cfg.universe(context.map(LContext::universe))?;
        let s = cfg.parameterization(&universe)?;
        let _ = writeln!(err, "|S| = {}", s.len());
        let cap = common.cap.unwrap_or(cfg.enum_cap);
        if cap == 0 {
            return Err(Error::Parse("--cap must be positive".into()));
        }
        Ok(Env { cfg, universe, s, json: common.json, cap })
    }

    fn theory(&self, path: Option<&Path>) -> Result<Theory> {
        match path {
            Some(p) => Theory::parse(&self.universe, &self.cfg.chain, &read(p)?),
            None => Ok(Theory::empty(self.universe.len())),
        }
    }

    fn fai(&self, text: &str) -> Result<Fai> {
        Fai::parse(&self.universe, &self.cfg.chain, text)
    }

    fn render_set(&self, set: &crate::fset::LSet) -> String {
        self.universe.render(&self.cfg.chain, set)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_context(common: &Common, path: &Path) -> Result<(RunConfig, LContext)> {
    let cfg = RunConfig::load(&common.params)?;
    let ctx = LContext::load_csv(path, cfg.chain.clone())?;
    Ok((cfg, ctx))
}

fn print_json(out: &mut dyn Write, v: serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json value"))?;
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Negative) => EXIT_NEGATIVE,
        Err(Error::NotProvable) => {
            let _ = writeln!(err, "{}", Error::NotProvable);
            EXIT_NEGATIVE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::Closure { common, theory, set } => {
            let env = Env::load(&common, None, err)?;
            let theory = env.theory(theory.as_deref())?;
            let a = env.universe.parse_lset(&env.cfg.chain, &set)?;
            let closed = Closure::new(&theory, &env.s)?.close(&a);
            if env.json {
                print_json(out, json!({ "closure": env.render_set(&closed) }))?;
            } else {
                writeln!(out, "{}", env.render_set(&closed))?;
            }
            Ok(Outcome::Ok)
        }
        Command::Entail { common, theory, query } => {
            let env = Env::load(&common, None, err)?;
            let theory = env.theory(theory.as_deref())?;
            let q = env.fai(&query)?;
            let d = crate::semantics::entail_degree(&theory, &q, &env.s)?;
            let entailed = d == env.cfg.chain.top();
            let text = env.cfg.chain.format_degree(d);
            if env.json {
                print_json(out, json!({ "degree": text, "entailed": entailed }))?;
            } else {
                writeln!(out, "{text}")?;
            }
            Ok(if entailed { Outcome::Ok } else { Outcome::Negative })
        }
        Command::Base { common, base } => run_base(&common, &base, out, err),
        Command::CompleteSet { common, context, out: dest } => {
            let base = BaseArgs { context, complete_only: true, strengthen: false, minimize_sides: false, out: dest };
            run_base(&common, &base, out, err)
        }
        Command::Intents { common, context, dot, list } => {
            let (cfg, ctx) = load_context(&common, &context)?;
            let env = Env::with_config(cfg, &common, Some(&ctx), err)?;
            let cc = ContextClosure::new(&ctx, &env.s)?;
            let intents = cc.intents(env.cap)?;
            if let Some(path) = dot {
                write_file(&path, &hasse_dot(&intents, &env.universe, &env.cfg.chain))?;
            }
            let rendered: Vec<String> = intents.iter().map(|m| env.render_set(m)).collect();
            if env.json {
                print_json(out, json!({ "count": intents.len(), "intents": rendered }))?;
            } else {
                writeln!(out, "{}", intents.len())?;
                if list {
                    for r in rendered {
                        writeln!(out, "{r}")?;
                    }
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Models { common, theory, list } => {
            let env = Env::load(&common, None, err)?;
            let theory = env.theory(theory.as_deref())?;
            let models = models_enum(&theory, &env.s, env.cap)?;
            let rendered: Vec<String> = models.iter().map(|m| env.render_set(m)).collect();
            if env.json {
                print_json(out, json!({ "count": models.len(), "models": rendered }))?;
            } else {
                writeln!(out, "{}", models.len())?;
                if list {
                    for r in rendered {
                        writeln!(out, "{r}")?;
                    }
                }
            }
            Ok(Outcome::Ok)
        }
        Command::CheckProof { common, theory, proof, query, allow_cutf } => {
            let env = Env::load(&common, None, err)?;
            let theory = env.theory(theory.as_deref())?;
            let opts = CheckOptions::with_cut_f(allow_cutf);
            let verdict = parse_proof(&read(&proof)?, &env.universe, &env.s).and_then(|p| {
                let goal = match &query {
                    Some(q) => env.fai(q)?,
                    None => p.goal().clone(),
                };
                check_proof_of(&theory, &env.s, &p, &goal, opts).map(|_| p)
            });
            match verdict {
                Ok(p) => {
                    let goal = p.goal().render(&env.universe, &env.cfg.chain);
                    if env.json {
                        print_json(out, json!({ "valid": true, "goal": goal, "steps": p.len() }))?;
                    } else {
                        writeln!(out, "ok: {goal} ({} steps)", p.len())?;
                    }
                    Ok(Outcome::Ok)
                }
                Err(e @ (Error::InvalidStep { .. } | Error::GoalMismatch { .. } | Error::InvalidProof(_))) => {
                    writeln!(err, "invalid proof: {e}")?;
                    if env.json {
                        print_json(out, json!({ "valid": false, "error": e.to_string() }))?;
                    } else {
                        writeln!(out, "invalid")?;
                    }
                    Ok(Outcome::Negative)
                }
                Err(e) => Err(e),
            }
        }
        Command::Prove { common, theory, query, out: dest } => {
            let env = Env::load(&common, None, err)?;
            let theory = env.theory(theory.as_deref())?;
            let goal = env.fai(&query)?;
            let p = prove(&theory, &env.s, &goal)?;
            let text = render_proof(&p, &env.universe, &env.s);
            match dest {
                Some(path) => {
                    write_file(&path, &text)?;
                    writeln!(out, "{} steps", p.len())?;
                }
                None => write!(out, "{text}")?,
            }
            Ok(Outcome::Ok)
        }
        Command::Validate { common, context, theory } => {
            let (cfg, ctx) = match &context {
                Some(path) => {
                    let (cfg, ctx) = load_context(&common, path)?;
                    (cfg, Some(ctx))
                }
                None => (RunConfig::load(&common.params)?, None),
            };
            let env = Env::with_config(cfg, &common, ctx.as_ref(), err)?;
            for c in env.cfg.generator_connections(&env.universe)? {
                Connection::new_verified(
                    c.term().clone(),
                    env.cfg.chain.clone(),
                    env.universe.len(),
                    env.cfg.verify_cap,
                )?;
            }
            if !env.s.all_intensive() {
                writeln!(err, "notice: S contains non-intensive connections")?;
            }
            let theory = env.theory(theory.as_deref())?;
            if env.json {
                print_json(
                    out,
                    json!({
                        "valid": true,
                        "degrees": env.cfg.chain.len(),
                        "attributes": env.universe.len(),
                        "connections": env.s.len(),
                        "intensive": env.s.all_intensive(),
                        "objects": ctx.as_ref().map(|c| c.objects().len()),
                        "rules": theory.len(),
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "ok: |L| = {}, |Y| = {}, |S| = {}",
                    env.cfg.chain.len(),
                    env.universe.len(),
                    env.s.len()
                )?;
            }
            Ok(Outcome::Ok)
        }
    }
}

fn run_base(common: &Common, args: &BaseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let (cfg, ctx) = load_context(common, &args.context)?;
    let env = Env::with_config(cfg, common, Some(&ctx), err)?;
    let cc = ContextClosure::new(&ctx, &env.s)?;
    let mut theory = cc.complete_set(env.cap)?;
    if !args.complete_only {
        if args.strengthen {
            theory = cc.strengthen_antecedents(&theory)?;
        }
        theory = cc.reduce_to_base(&theory, env.cap)?;
    }
    if args.minimize_sides {
        theory = cc.minimize_sides(&theory, env.cap)?;
    }
    let text = theory.render(&env.universe, &env.cfg.chain);
    if env.json {
        let rules: Vec<&str> = text.lines().collect();
        print_json(out, json!({ "count": theory.len(), "rules": rules }))?;
        if let Some(path) = &args.out {
            write_file(path, &text)?;
        }
        return Ok(Outcome::Ok);
    }
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            writeln!(out, "{}", theory.len())?;
        }
        None => {
            writeln!(out, "# {} rules", theory.len())?;
            write!(out, "{text}")?;
        }
    }
    Ok(Outcome::Ok)
}
