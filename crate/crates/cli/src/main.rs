//! `disco-jp`: grammaticality checks, parses, diagrams, discourse circuits
//! and toy tensor meanings for pre-tokenized Japanese.
//!
//! Exit codes: 0 success, 1 input not grammatical (or not evaluable),
//! 2 usage or lexicon error.

use clap::{Args, Parser, Subcommand};
use disco_jp::circuit::{compile, render_circuit, CompileOptions, PrimarySelection};
use disco_jp::diagram::{Diagram, Format};
use disco_jp::lexicon::Lexicon;
use disco_jp::parser::{analyze, Analysis, Parse, ParseError, ParseOptions, Sentence};
use disco_jp::pregroup::BaseSymbol;
use disco_jp::semantics::{assign, evaluate, similarity, SpaceAssignment, Tensor, DEFAULT_DIM};
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "disco-jp",
    version,
    about = "Pregroup grammar tools for tokenized Japanese"
)]
struct Cli {
    /// Lexicon file, or one of the bundled names `jp-core` and `en-demo`.
    #[arg(
        long,
        global = true,
        env = "DISCO_JP_LEXICON",
        default_value = "jp-core"
    )]
    lexicon: String,
    /// Output format: json, dot, ascii or svg.
    #[arg(long, global = true, default_value = "ascii")]
    format: String,
    /// Sentence base type the residue must reduce to (default q, or s when
    /// the lexicon has no q).
    #[arg(long, global = true)]
    target: Option<String>,
    /// Append an omitted copula after a final adjectival noun.
    #[arg(long, global = true)]
    insert_copula: bool,
    /// Prepend the carried topic and が to sentences lacking は and が.
    #[arg(long, global = true)]
    insert_topic: bool,
    #[arg(long, global = true, default_value_t = 64)]
    max_parses: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Tokens, as separate arguments or one quoted string.
    tokens: Vec<String>,
    /// Read sentences from a file, one per line (`-` for stdin).
    #[arg(long, conflicts_with = "tokens")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exit 0 when the sentence is grammatical, 1 when it is not.
    Check(Input),
    /// List every grammatical parse with its role frame.
    Parse(Input),
    /// Render the best parse as a string diagram.
    Diagram { tokens: Vec<String> },
    /// Compile a discourse (one sentence per line) into a circuit.
    Circuit {
        /// Sentence file, `-` for stdin.
        file: PathBuf,
        /// Comma-separated primary nouns, in wire order.
        #[arg(long, value_delimiter = ',')]
        primary: Option<Vec<String>>,
    },
    /// Evaluate a sentence meaning, or compare two sentences.
    Eval {
        /// Tokens of one sentence, or two quoted sentences with --compare.
        sentences: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_DIM)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the cosine similarity of two sentences.
        #[arg(long)]
        compare: bool,
    },
}

enum Failure {
    /// Input rejected by the grammar.
    Rejected(String),
    /// Bad invocation or unusable lexicon.
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Rejected(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

type Out = Result<(Vec<u8>, bool), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((bytes, ok)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            let (Failure::Rejected(m) | Failure::Usage(m)) = &f;
            eprintln!("disco-jp: {m}");
            ExitCode::from(f.code())
        }
    }
}

fn load_lexicon(name: &str) -> Result<Lexicon, Failure> {
    let path = std::path::Path::new(name);
    if !path.exists() {
        match name {
            "jp-core" => return Ok(Lexicon::jp_core()),
            "en-demo" => return Ok(Lexicon::en_demo()),
            _ => {}
        }
    }
    Lexicon::load(path).map_err(|e| Failure::Usage(e.to_string()))
}

fn read_lines(path: &PathBuf) -> Result<Vec<String>, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn sentences(input: &Input) -> Result<Vec<String>, Failure> {
    match &input.file {
        Some(p) => read_lines(p),
        None if input.tokens.is_empty() => Err(Failure::Usage("no tokens given".into())),
        None => Ok(vec![input.tokens.join(" ")]),
    }
}

fn format_of(cli: &Cli, allowed: &[Format]) -> Result<Format, Failure> {
    let f: Format = cli
        .format
        .parse()
        .map_err(|e: disco_jp::diagram::DiagramError| Failure::Usage(e.to_string()))?;
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!(
            "format `{f}` is not available for this command"
        )))
    }
}

struct Ctx {
    lex: Lexicon,
    opts: ParseOptions,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let lex = load_lexicon(&cli.lexicon)?;
        let target = match &cli.target {
            Some(t) => {
                let b = BaseSymbol::from(t.as_str());
                if !lex.signature().contains(&b) {
                    return Err(Failure::Usage(format!(
                        "target `{t}` is not in the signature"
                    )));
                }
                Some(b)
            }
            None => None,
        };
        if cli.max_parses == 0 {
            return Err(Failure::Usage("--max-parses must be at least 1".into()));
        }
        let opts = ParseOptions {
            target,
            insert_copula: cli.insert_copula,
            insert_topic: cli.insert_topic,
            max_parses: cli.max_parses,
            ..ParseOptions::default()
        };
        Ok(Ctx { lex, opts })
    }

    fn analyze(&self, line: &str, carried_topic: Option<String>) -> Result<Analysis, Failure> {
        let opts = ParseOptions {
            carried_topic,
            ..self.opts.clone()
        };
        analyze(&self.lex, &Sentence::from_line(line), &opts).map_err(|e| match e {
            ParseError::EmptySentence => Failure::Usage("empty sentence".into()),
            other => Failure::Rejected(format!("{other}: {line}")),
        })
    }

    /// Best parse, or a rejection echoing the sentence.
    fn best(
        &self,
        line: &str,
        carried_topic: Option<String>,
    ) -> Result<(Analysis, Parse), Failure> {
        let a = self.analyze(line, carried_topic)?;
        match a.parses.first() {
            Some(p) => {
                let p = p.clone();
                Ok((a, p))
            }
            None => Err(Failure::Rejected(format!("not grammatical: {line}"))),
        }
    }
}

fn links_text(p: &Parse) -> String {
    p.reduction
        .links
        .iter()
        .map(|(i, j)| format!("({i},{j})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn insertions_json(a: &Analysis) -> Value {
    json!(a.report.insertions)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s.into_bytes()
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Check(input) => check(cli, input),
        Command::Parse(input) => parse(cli, input),
        Command::Diagram { tokens } => diagram(cli, tokens),
        Command::Circuit { file, primary } => circuit(cli, file, primary.as_deref()),
        Command::Eval {
            sentences,
            dim,
            seed,
            compare,
        } => eval(cli, sentences, *dim, *seed, *compare),
    }
}

fn check(cli: &Cli, input: &Input) -> Out {
    let format = format_of(cli, &[Format::Ascii, Format::Json])?;
    let ctx = Ctx::new(cli)?;
    let lines = sentences(input)?;
    let mut text = String::new();
    let mut results = Vec::new();
    let mut all_ok = true;
    for line in &lines {
        let a = match ctx.analyze(line, None) {
            Ok(a) => a,
            Err(Failure::Rejected(m)) if lines.len() > 1 => {
                all_ok = false;
                text.push_str(&format!("{line}\tnot grammatical: {m}\n"));
                results.push(json!({ "sentence": line, "grammatical": false, "error": m }));
                continue;
            }
            Err(e) => return Err(e),
        };
        match a.parses.first() {
            Some(p) => {
                if lines.len() > 1 {
                    text.push_str(&format!("{line}\t"));
                }
                text.push_str(&format!("{}\nlinks: {}\n", p.residue_type, links_text(p)));
                results.push(json!({
                    "sentence": line,
                    "tokens": a.sentence.tokens,
                    "grammatical": true,
                    "residue": p.residue_type.to_string(),
                    "links": p.reduction.links,
                    "insertions": insertions_json(&a),
                }));
            }
            None if lines.len() == 1 => {
                return Err(Failure::Rejected(format!("not grammatical: {line}")));
            }
            None => {
                all_ok = false;
                text.push_str(&format!("{line}\tnot grammatical\n"));
                results.push(json!({ "sentence": line, "grammatical": false }));
            }
        }
    }
    let bytes = match format {
        Format::Json => pretty(&json!({
            "schema_version": OUTPUT_SCHEMA_VERSION,
            "results": results,
        })),
        _ => text.into_bytes(),
    };
    Ok((bytes, all_ok))
}

fn parse(cli: &Cli, input: &Input) -> Out {
    let format = format_of(cli, &[Format::Ascii, Format::Json])?;
    let ctx = Ctx::new(cli)?;
    let mut text = String::new();
    let mut docs = Vec::new();
    for line in sentences(input)? {
        let a = ctx.analyze(&line, None)?;
        if a.parses.is_empty() {
            return Err(Failure::Rejected(format!("not grammatical: {line}")));
        }
        text.push_str(&a.sentence.tokens.join(" "));
        if !a.report.is_empty() {
            let added: Vec<&str> = a
                .report
                .insertions
                .iter()
                .map(|i| i.token.as_str())
                .collect();
            text.push_str(&format!("  (inserted {})", added.join(" ")));
        }
        text.push('\n');
        let mut parses = Vec::new();
        for (k, p) in a.parses.iter().enumerate() {
            let roles = p
                .extract_roles()
                .map_err(|e| Failure::Rejected(format!("{e}: {line}")))?;
            let usages: Vec<String> = p
                .token_usages
                .iter()
                .map(|c| format!("{}:{}[{}]", c.token, c.usage.label, c.usage.assignment))
                .collect();
            let name = |i: usize| p.token_usages[i].token.clone();
            text.push_str(&format!(
                "  parse {}: residue {}  links {}\n    usages: {}\n    engine: {}",
                k + 1,
                p.residue_type,
                links_text(p),
                usages.join(" "),
                name(roles.engine)
            ));
            if let Some(t) = roles.topic {
                text.push_str(&format!("  topic: {}", name(t)));
            }
            if let Some(s) = roles.subject {
                text.push_str(&format!("  subject: {}", name(s)));
            }
            if !roles.objects.is_empty() {
                let o: Vec<String> = roles.objects.iter().map(|&i| name(i)).collect();
                text.push_str(&format!("  objects: {}", o.join(",")));
            }
            if !roles.adverbs.is_empty() {
                let o: Vec<String> = roles.adverbs.iter().map(|&i| name(i)).collect();
                text.push_str(&format!("  adverbs: {}", o.join(",")));
            }
            text.push('\n');
            parses.push(json!({ "parse": p, "roles": roles }));
        }
        if a.truncated {
            text.push_str("  (parse list truncated)\n");
        }
        docs.push(json!({
            "sentence": line,
            "tokens": a.sentence.tokens,
            "insertions": insertions_json(&a),
            "truncated": a.truncated,
            "parses": parses,
        }));
    }
    let bytes = match format {
        Format::Json => pretty(&json!({
            "schema_version": OUTPUT_SCHEMA_VERSION,
            "sentences": docs,
        })),
        _ => text.into_bytes(),
    };
    Ok((bytes, true))
}

fn diagram(cli: &Cli, tokens: &[String]) -> Out {
    let format = format_of(
        cli,
        &[Format::Ascii, Format::Json, Format::Dot, Format::Svg],
    )?;
    let ctx = Ctx::new(cli)?;
    if tokens.is_empty() {
        return Err(Failure::Usage("no tokens given".into()));
    }
    let (_, p) = ctx.best(&tokens.join(" "), None)?;
    Ok((Diagram::from_parse(&p).render(format), true))
}

fn circuit(cli: &Cli, file: &PathBuf, primary: Option<&[String]>) -> Out {
    let format = format_of(cli, &[Format::Ascii, Format::Json, Format::Dot])?;
    let ctx = Ctx::new(cli)?;
    let lines = read_lines(file)?;
    let mut parses = Vec::with_capacity(lines.len());
    let mut topic: Option<String> = None;
    for line in &lines {
        let (_, p) = ctx.best(line, topic.clone())?;
        if let Ok(r) = p.extract_roles() {
            if let Some(t) = r.topic {
                topic = Some(p.token_usages[t].surface.clone());
            }
        }
        parses.push(p);
    }
    let opts = CompileOptions {
        primary: match primary {
            Some(list) => PrimarySelection::Explicit(
                list.iter()
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            ),
            None => PrimarySelection::Default,
        },
        ..CompileOptions::default()
    };
    let session = compile(&ctx.lex, &parses, &opts).map_err(|e| match e {
        disco_jp::circuit::CircuitError::UnknownPrimary(_) => Failure::Usage(e.to_string()),
        other => Failure::Rejected(other.to_string()),
    })?;
    let bytes = render_circuit(&session, format).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((bytes, true))
}

fn meaning(ctx: &Ctx, line: &str, sa: &SpaceAssignment) -> Result<Tensor, Failure> {
    let (_, p) = ctx.best(line, None)?;
    let store = assign(&ctx.lex, sa);
    evaluate(&Diagram::from_parse(&p), &store, sa)
        .map_err(|e| Failure::Rejected(format!("{e}: {line}")))
}

/// Rounds away float noise so that equal meanings print as `1.0`.
fn tidy(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn eval(cli: &Cli, sentences: &[String], dim: usize, seed: u64, compare: bool) -> Out {
    let format = format_of(cli, &[Format::Ascii, Format::Json])?;
    let ctx = Ctx::new(cli)?;
    let sa = SpaceAssignment::new(ctx.lex.signature(), dim, seed)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if compare {
        let [a, b] = sentences else {
            return Err(Failure::Usage(
                "--compare takes exactly two sentences".into(),
            ));
        };
        let (va, vb) = (meaning(&ctx, a, &sa)?, meaning(&ctx, b, &sa)?);
        let sim = tidy(similarity(&va, &vb).map_err(|e| Failure::Rejected(e.to_string()))?);
        let bytes = match format {
            Format::Json => pretty(&json!({
                "schema_version": OUTPUT_SCHEMA_VERSION,
                "dim": dim,
                "seed": seed,
                "sentences": [a, b],
                "similarity": sim,
            })),
            _ => format!("{sim:?}\n").into_bytes(),
        };
        return Ok((bytes, true));
    }
    if sentences.is_empty() {
        return Err(Failure::Usage("no tokens given".into()));
    }
    let line = sentences.join(" ");
    let v = meaning(&ctx, &line, &sa)?;
    let data: Vec<f64> = v.data().iter().map(|&x| tidy(x)).collect();
    let bytes = match format {
        Format::Json => pretty(&json!({
            "schema_version": OUTPUT_SCHEMA_VERSION,
            "dim": dim,
            "seed": seed,
            "sentence": line,
            "shape": v.shape(),
            "data": data,
        })),
        _ => {
            let cells: Vec<String> = data.iter().map(|x| format!("{x:.6}")).collect();
            format!("{}\n", cells.join(" ")).into_bytes()
        }
    };
    Ok((bytes, true))
}
