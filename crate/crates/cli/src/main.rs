//! Command-line driver: each subcommand loads the persisted graph, runs one
//! step and writes the graph back.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bindforge::asg::diff;
use bindforge::controllers::{OptionValue, Options};
use bindforge::doc::{convert_with_lints, AsgResolver, NoResolver};
use bindforge::generators::{generate, names, GenerateConfig};
use bindforge::parser::{parse, Bootstrap, ParseConfig};
use bindforge::registry::PassRegistry;
use bindforge::{Asg, Lint, NodeId, NodeKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bindforge", version, about = "Parse C++ headers and generate Boost.Python wrappers")]
struct Cli {
    /// Persisted graph read and rewritten by each step.
    #[arg(long, global = true, default_value = "bindforge.asg")]
    asg: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse headers into the graph. Compiler flags follow `--`.
    Parse {
        #[arg(required = true)]
        headers: Vec<PathBuf>,
        #[command(flatten)]
        parse: ParseArgs,
    },
    /// Run a controller pass, with options given as `--key=value`.
    Control {
        name: String,
        #[arg(allow_hyphen_values = true, trailing_var_arg = true)]
        options: Vec<String>,
    },
    /// Select nodes and write wrappers; prints the manifest.
    Generate(GenerateArgs),
    /// List nodes, show one node, or list incomplete specializations.
    Query {
        expr: Option<String>,
        /// Restrict to node kinds (repeatable).
        #[arg(long)]
        kind: Vec<NodeKind>,
        /// Regular expression over global names.
        #[arg(long)]
        pattern: Option<String>,
        /// With `members`, also list the node's children.
        #[arg(long)]
        show: Option<String>,
        /// Specializations referenced but never instantiated.
        #[arg(long)]
        incomplete: bool,
    },
    /// Union another persisted graph into this one.
    Merge { other: PathBuf },
    /// `parse`, `control default` and `generate` in one step.
    Wrap {
        #[arg(required = true)]
        headers: Vec<PathBuf>,
        #[command(flatten)]
        parse: ParseArgs,
        #[command(flatten)]
        generate: GenerateArgs,
    },
    /// Convert a Doxygen comment on stdin to Sphinx markup on stdout.
    DocConvert {
        /// Resolve references from this node of the graph.
        #[arg(long)]
        context: Option<String>,
        /// Dotted module prefixed to resolved references.
        #[arg(long, default_value = "")]
        module: String,
    },
    /// Compare two persisted graphs: exit 0 if identical, 1 otherwise.
    AsgDiff { left: PathBuf, right: PathBuf },
}

#[derive(Args)]
struct ParseArgs {
    /// Instantiation rounds: `inf`, `off` or a count.
    #[arg(long, default_value = "inf")]
    bootstrap: Bootstrap,
    #[arg(last = true, allow_hyphen_values = true)]
    flags: Vec<String>,
}

#[derive(Args, Clone)]
struct GenerateArgs {
    /// `internal`, `pattern` or a registered selector name.
    #[arg(long, default_value = "internal")]
    selector: String,
    #[arg(long)]
    pattern: Option<String>,
    /// Module file, relative to the output directory.
    #[arg(long, default_value = "module.cpp")]
    module: PathBuf,
    /// Python decorator script, relative to the output directory.
    #[arg(long)]
    decorator: Option<PathBuf>,
    /// Wrap only the selected nodes, not their dependencies.
    #[arg(long)]
    no_closure: bool,
    #[arg(long, default_value = "wrapper_")]
    prefix: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Exit with status 1 when any lint is raised.
    #[arg(long)]
    deny_lints: bool,
}

/// Failure with a specific exit status.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit status {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("BINDFORGE_LOG")).init();
    let args: Vec<String> = std::env::args().collect();
    let mut cli = Cli::parse();
    extract_trailing_asg(&mut cli);
    match run(&cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Exit>() {
            Some(Exit(code)) => ExitCode::from(*code),
            None => {
                eprintln!("bindforge: {e:#}");
                ExitCode::from(if matches!(cli.command, Command::AsgDiff { .. }) { 2 } else { 1 })
            }
        },
    }
}

/// `--asg PATH` written among compiler flags or controller options belongs
/// to us.
fn extract_trailing_asg(cli: &mut Cli) {
    let flags = match &mut cli.command {
        Command::Parse { parse, .. } | Command::Wrap { parse, .. } => &mut parse.flags,
        Command::Control { options, .. } => options,
        _ => return,
    };
    let mut kept = Vec::new();
    let mut iter = std::mem::take(flags).into_iter();
    while let Some(f) = iter.next() {
        if f == "--asg" {
            if let Some(path) = iter.next() {
                cli.asg = PathBuf::from(path);
            }
        } else if let Some(path) = f.strip_prefix("--asg=") {
            cli.asg = PathBuf::from(path);
        } else {
            kept.push(f);
        }
    }
    *flags = kept;
}

fn run(cli: &Cli, args: &[String]) -> Result<()> {
    let registry = PassRegistry::default();
    match &cli.command {
        Command::Parse { headers, parse: p } => {
            let mut asg = load_or_new(&cli.asg)?;
            run_parse(&mut asg, headers, p)?;
            save(&cli.asg, &asg, args)
        }
        Command::Control { name, options } => {
            let mut asg = load(&cli.asg)?;
            report(&run_control(&registry, &mut asg, name, &parse_options(options)?)?);
            save(&cli.asg, &asg, args)
        }
        Command::Generate(g) => {
            let mut asg = load(&cli.asg)?;
            run_generate(&registry, &mut asg, g)?;
            save(&cli.asg, &asg, args)
        }
        Command::Wrap { headers, parse: p, generate: g } => {
            let mut asg = load_or_new(&cli.asg)?;
            run_parse(&mut asg, headers, p)?;
            report(&run_control(&registry, &mut asg, "default", &Options::new())?);
            run_generate(&registry, &mut asg, g)?;
            save(&cli.asg, &asg, args)
        }
        Command::Query { expr, kind, pattern, show, incomplete } => {
            let asg = load(&cli.asg)?;
            query(&asg, expr.as_deref(), kind, pattern.as_deref(), show.as_deref(), *incomplete)
        }
        Command::Merge { other } => {
            let mut asg = load_or_new(&cli.asg)?;
            asg.merge(&load(other)?)?;
            save(&cli.asg, &asg, args)
        }
        Command::DocConvert { context, module } => {
            let mut input = String::new();
            std::io::stdin().read_to_string(&mut input)?;
            let (out, lints) = match context {
                Some(ctx) => {
                    let asg = load(&cli.asg)?;
                    let resolver = AsgResolver::new(&asg, module.clone(), NodeId::new(ctx.as_str()));
                    convert_with_lints(&input, &resolver, ctx)
                }
                None => convert_with_lints(&input, &NoResolver, ""),
            };
            report(&lints);
            println!("{out}");
            Ok(())
        }
        Command::AsgDiff { left, right } => {
            let d = diff(&load(left)?, &load(right)?);
            if d.is_empty() {
                return Ok(());
            }
            print!("{}", d.render());
            Err(Exit(1).into())
        }
    }
}

fn run_parse(asg: &mut Asg, headers: &[PathBuf], p: &ParseArgs) -> Result<()> {
    let config = ParseConfig::new(headers.iter().cloned(), p.flags.iter().cloned()).with_bootstrap(p.bootstrap);
    parse(asg, &config)?;
    Ok(())
}

fn run_control(registry: &PassRegistry, asg: &mut Asg, name: &str, options: &Options) -> Result<Vec<Lint>> {
    let controller = registry.controllers.get(name)?;
    Ok(controller(asg, options)?)
}

fn run_generate(registry: &PassRegistry, asg: &mut Asg, g: &GenerateArgs) -> Result<()> {
    let selector_name = match g.selector.as_str() {
        "internal" => "boost_python_internal",
        "pattern" => "boost_python_pattern",
        other => other,
    };
    let selector = registry.selectors.get(selector_name)?;
    let module_name = names::module_dotted(&g.module);
    let nodes: BTreeSet<NodeId> = selector(asg, &module_name, g.pattern.as_deref())?;
    let mut config = GenerateConfig::new(nodes, g.module.clone());
    config.decorator = g.decorator.clone();
    config.closure = !g.no_closure;
    config.prefix = g.prefix.clone();
    config.templates = registry.templates.selected().1;
    let generation = generate(asg, &config)?;
    report(&generation.lints);
    if g.deny_lints && !generation.lints.is_empty() {
        eprintln!("error: {} lint(s) raised with --deny-lints", generation.lints.len());
        return Err(Exit(1).into());
    }
    generation.wrappers.write(&g.out_dir)?;
    generation.mark_exported(asg, &module_name);
    print!("{}", generation.wrappers.manifest_text());
    Ok(())
}

fn report(lints: &[Lint]) {
    for l in lints {
        eprintln!("{l}");
    }
}

/// `--key=value` pairs; a bare `--flag` is `true`; repeated keys collect.
fn parse_options(raw: &[String]) -> Result<Options> {
    let mut out = Options::new();
    for item in raw {
        let Some(body) = item.strip_prefix("--") else { bail!("expected `--key=value`, got `{item}`") };
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), OptionValue::Str(v.to_string())),
            None => (body.to_string(), OptionValue::Bool(true)),
        };
        let merged = match out.remove(&key) {
            None => value,
            Some(prev) => {
                let mut list = prev.as_list();
                list.extend(value.as_list());
                OptionValue::List(list)
            }
        };
        out.insert(key, merged);
    }
    Ok(out)
}

fn query(asg: &Asg, expr: Option<&str>, kinds: &[NodeKind], pattern: Option<&str>, show: Option<&str>, incomplete: bool) -> Result<()> {
    let mut out = std::io::stdout().lock();
    if incomplete {
        for id in asg.incomplete_referenced_specializations() {
            writeln!(out, "{id}")?;
        }
        return Ok(());
    }
    if let Some(expr) = expr {
        let node = asg.lookup(expr)?;
        writeln!(out, "{}\t{}", node.kind(), node.id)?;
        match show {
            None => {}
            Some("members") => {
                for child in asg.children(expr) {
                    writeln!(out, "  {}\t{}\t{}", child.kind(), child.access, child.id)?;
                }
            }
            Some(other) => bail!("unknown --show value `{other}` (expected `members`)"),
        }
        return Ok(());
    }
    let kinds: BTreeSet<NodeKind> = kinds.iter().copied().collect();
    for node in asg.iterate(&kinds, pattern)? {
        writeln!(out, "{}\t{}", node.kind(), node.id)?;
    }
    Ok(())
}

fn load(path: &Path) -> Result<Asg> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read graph {}", path.display()))?;
    Asg::load(&text).with_context(|| format!("cannot load graph {}", path.display()))
}

fn load_or_new(path: &Path) -> Result<Asg> {
    if path.exists() {
        load(path)
    } else {
        Ok(Asg::new())
    }
}

/// Atomically replaces the graph file and appends the command to the
/// `<asg>.log` sidecar.
fn save(path: &Path, asg: &Asg, args: &[String]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(asg.save().as_bytes())?;
    tmp.persist(path).with_context(|| format!("cannot write graph {}", path.display()))?;
    let mut log_path = path.as_os_str().to_owned();
    log_path.push(".log");
    let mut log = std::fs::OpenOptions::new().create(true).append(true).open(PathBuf::from(log_path))?;
    writeln!(log, "{}", args.get(1..).unwrap_or_default().join(" "))?;
    Ok(())
}
