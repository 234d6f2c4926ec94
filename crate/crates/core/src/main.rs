use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chainlab::corpus::{self, UNKNOWN_TOKEN};
use chainlab::discriminative::{derive_disc_params, disc_mpm_decode, disc_viterbi};
use chainlab::equivalence::convert_crf_to_hmm;
use chainlab::inference::{map_decode, mpm_decode};
use chainlab::io::{self, Model};
use chainlab::verify::{self, SuiteConfig};
use chainlab::{oracle, DiscriminativeParams, Error, HmmModel};

const SCHEMAS: &str = "\
Model files are JSON documents tagged by a \"format\" field.

  chainlab-hmm-v1
    labels, observations: string arrays
    length: null for a stationary model, else N
    initial: [p(x1)]
    transitions: list of |L|x|L| matrices p(x'|x) (one if stationary, else N-1)
    emissions: list of |L|x|O| matrices p(y|x) (one if stationary, else N)

  chainlab-crf-v1
    labels, observations
    pairwise: N-1 matrices V_n(x, x') (log-domain scores)
    unary: N matrices U_n(x, y) (log-domain scores)

  chainlab-disc-v1
    labels, observations, length
    consistency: \"chain-consistent\" or \"raw\"
    prior_marginals: list of [p(x_n)] (one if stationary)
    transitions: list of |L|x|L| matrices p(x'|x)
    label_given_obs: list of |O|x|L| matrices p(x|y)

  chainlab-potchain-v1
    states: string array
    log_potentials: N-1 matrices log phi_n(w, w')

Probabilities are stored in linear space, matrices as row-major arrays of
arrays. Corpora are UTF-8 TSV: one \"token<TAB>TAG\" per line, a blank line
between sequences, lines starting with '#' ignored.

Exit codes: 0 success, 1 usage, 2 I/O or parse, 3 capacity, 4 numeric or
degenerate model (including a failed verification).";

#[derive(Parser)]
#[command(name = "chainlab", version, about = "Exact HMM / linear-chain CRF inference", after_long_help = SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a stationary model from a tagged corpus
    Fit {
        #[arg(long)]
        corpus: PathBuf,
        /// Add-k smoothing constant
        #[arg(long, default_value_t = corpus::DEFAULT_SMOOTHING)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Hmm)]
        kind: Kind,
    },
    /// Build the HMM whose posterior equals a linear-chain CRF
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tag token sequences (one token per line, blank line between sequences)
    Tag {
        #[arg(long)]
        model: PathBuf,
        /// Token file; standard input when absent
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Decoder::Mpm)]
        decoder: Decoder,
        #[arg(long, value_enum, default_value_t = Mode::Generative)]
        mode: Mode,
    },
    /// Certify models (or a seeded random suite) against exhaustive enumeration
    Verify {
        /// Model files to check; the random suite runs when none are given
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        /// Longest sequence checked for stationary models and random suites
        #[arg(long = "max-n", default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Random HMMs in the suite (CRFs and potential chains get half)
        #[arg(long = "random-models", default_value_t = 200)]
        random_models: usize,
        /// Oracle enumeration cap
        #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
        cap: u128,
        /// Write the JSON report here instead of standard output
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Per-token accuracy of predicted tags against gold tags
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Hmm,
    Disc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Decoder {
    Mpm,
    Map,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Generative,
    Discriminative,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::TooLarge { .. } => 3,
            Error::ImpossibleEvidence { .. } | Error::DegeneratePrior { .. } | Error::Numeric(_) => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_file(path: &Path, what: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: if e.kind() == std::io::ErrorKind::NotFound {
            format!("{what} not found: {}", path.display())
        } else {
            format!("{}: {e}", path.display())
        },
    })
}

fn load_model(path: &Path) -> CliResult<Model> {
    let text = read_file(path, "model")?;
    io::model_from_json(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_fit(corpus_path: &Path, k: f64, out: &Path, kind: Kind) -> CliResult<()> {
    let text = read_file(corpus_path, "corpus")?;
    let corpus = corpus::parse_corpus(&text, None)?;
    let model = match kind {
        Kind::Hmm => Model::Hmm(corpus::fit_hmm(&corpus, k)?),
        Kind::Disc => {
            let params = corpus::fit_disc_params(&corpus, k)?;
            for label in corpus::zero_prior_labels(&params) {
                eprintln!(
                    "warning: label {:?} has zero prior; decoding sequences longer than one token will fail",
                    params.labels().symbol(label).unwrap_or("?")
                );
            }
            Model::Disc(params)
        }
    };
    write_file(out, &io::model_to_json(&model)?)
}

fn cmd_convert(input: &Path, out: &Path) -> CliResult<()> {
    let Model::Crf(crf) = load_model(input)? else {
        return Err(Failure::usage("convert expects a chainlab-crf-v1 model"));
    };
    let hmm = convert_crf_to_hmm(&crf)?;
    write_file(out, &io::model_to_json(&Model::Hmm(hmm))?)
}

enum Tagger {
    Generative(HmmModel),
    Discriminative(DiscriminativeParams),
    /// Parameters derived from the HMM for each sequence length.
    Derived(HmmModel),
}

impl Tagger {
    fn labels(&self) -> &chainlab::Alphabet {
        match self {
            Tagger::Generative(m) | Tagger::Derived(m) => m.labels(),
            Tagger::Discriminative(p) => p.labels(),
        }
    }

    fn observations(&self) -> &chainlab::Alphabet {
        match self {
            Tagger::Generative(m) | Tagger::Derived(m) => m.observations(),
            Tagger::Discriminative(p) => p.observations(),
        }
    }

    fn decode(&self, y: &[usize], decoder: Decoder) -> chainlab::Result<(Vec<usize>, Option<f64>)> {
        let derived;
        let params = match self {
            Tagger::Generative(m) => {
                return Ok(match decoder {
                    Decoder::Mpm => (mpm_decode(m, y)?, None),
                    Decoder::Map => map_decode(m, y).map(|(p, s)| (p, Some(s)))?,
                })
            }
            Tagger::Discriminative(p) => p,
            Tagger::Derived(m) => {
                derived = derive_disc_params(m, y.len())?;
                &derived
            }
        };
        Ok(match decoder {
            Decoder::Mpm => (disc_mpm_decode(params, y)?, None),
            Decoder::Map => disc_viterbi(params, y).map(|(p, s)| (p, Some(s)))?,
        })
    }
}

fn cmd_tag(model: &Path, input: Option<&Path>, decoder: Decoder, mode: Mode) -> CliResult<String> {
    let tagger = match (load_model(model)?, mode) {
        (Model::Hmm(m), Mode::Generative) => Tagger::Generative(m),
        (Model::Hmm(m), Mode::Discriminative) => {
            eprintln!("notice: deriving discriminative parameters from the HMM");
            Tagger::Derived(m)
        }
        (Model::Disc(p), Mode::Discriminative) => Tagger::Discriminative(p),
        (Model::Disc(_), Mode::Generative) => {
            return Err(Failure::usage(
                "generative mode needs an HMM; use --mode discriminative with this model",
            ))
        }
        (other, _) => {
            return Err(Failure::usage(format!(
                "cannot tag with a {} model",
                other.kind()
            )))
        }
    };
    let text = match input {
        Some(path) => read_file(path, "input")?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure {
                code: 2,
                message: format!("stdin: {e}"),
            })?;
            s
        }
    };

    let mut out = String::new();
    for (i, tokens) in corpus::parse_tokens(&text).iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let y = corpus::encode_tokens(tagger.observations(), tokens).map_err(|e| match e {
            Error::Vocabulary { symbol, .. } => Failure {
                code: 2,
                message: format!(
                    "sequence {}: unknown token {symbol:?} and the model has no {UNKNOWN_TOKEN} symbol",
                    i + 1
                ),
            },
            other => other.into(),
        })?;
        let (path, score) = tagger.decode(&y, decoder)?;
        if let Some(score) = score {
            match mode {
                Mode::Generative => writeln!(out, "# log-score\t{score}"),
                Mode::Discriminative => writeln!(out, "# unnormalized log-score\t{score}"),
            }
            .expect("writing to a String");
        }
        for (token, &x) in tokens.iter().zip(&path) {
            let tag = tagger.labels().symbol(x).expect("decoded label in range");
            writeln!(out, "{token}\t{tag}").expect("writing to a String");
        }
    }
    Ok(out)
}

fn cmd_verify(
    models: &[PathBuf],
    max_n: usize,
    seed: u64,
    random_models: usize,
    cap: u128,
) -> CliResult<verify::Report> {
    if max_n == 0 {
        return Err(Failure::usage("--max-n must be positive"));
    }
    if models.is_empty() {
        let config = SuiteConfig {
            seed,
            hmm_models: random_models,
            crf_models: random_models.div_ceil(2),
            chain_models: random_models.div_ceil(2),
            max_len: max_n,
            min_len: max_n.min(2),
            cap,
            ..SuiteConfig::default()
        };
        return Ok(verify::run_random_suite(&config)?);
    }
    let mut reports = Vec::with_capacity(models.len());
    for path in models {
        let model = load_model(path)?;
        reports.push(verify::verify_model(&model, max_n, seed, cap)?);
    }
    Ok(verify::merge_reports(seed, reports))
}

fn cmd_eval(gold: &Path, pred: &Path) -> CliResult<f64> {
    let gold = corpus::parse_corpus(&read_file(gold, "gold corpus")?, None)?;
    let predicted = corpus::parse_corpus(&read_file(pred, "predictions")?, None)?;
    let sequences: Vec<Vec<usize>> = predicted
        .sequences
        .iter()
        .map(|s| {
            s.labels
                .iter()
                .flatten()
                .map(|&x| {
                    let tag = predicted.labels.symbol(x).expect("in range");
                    gold.labels.index_of(tag).unwrap_or(usize::MAX)
                })
                .collect()
        })
        .collect();
    Ok(corpus::evaluate_accuracy(&gold, &sequences)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Fit {
            corpus,
            k,
            out,
            kind,
        } => cmd_fit(&corpus, k, &out, kind),
        Command::Convert { input, out } => cmd_convert(&input, &out),
        Command::Tag {
            model,
            input,
            decoder,
            mode,
        } => {
            print!("{}", cmd_tag(&model, input.as_deref(), decoder, mode)?);
            Ok(())
        }
        Command::Verify {
            models,
            max_n,
            seed,
            random_models,
            cap,
            report,
        } => {
            let r = cmd_verify(&models, max_n, seed, random_models, cap)?;
            let json = serde_json::to_string_pretty(&r).expect("report serializes") + "\n";
            match report {
                Some(path) => {
                    write_file(&path, &json)?;
                    for c in &r.checks {
                        println!(
                            "{}\t{}\tmax_deviation={:e}\ttolerance={:e}\tcases={}",
                            if c.passed { "PASS" } else { "FAIL" },
                            c.name,
                            c.max_deviation,
                            c.tolerance,
                            c.cases
                        );
                    }
                }
                None => print!("{json}"),
            }
            if r.passed {
                Ok(())
            } else {
                Err(Failure {
                    code: 4,
                    message: "verification failed".into(),
                })
            }
        }
        Command::Eval { gold, pred } => {
            println!("accuracy\t{}", cmd_eval(&gold, &pred)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("chainlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
