//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chainlab::discriminative::{
    derive_disc_params, disc_mpm_decode, disc_posterior_marginals, disc_viterbi,
};
use chainlab::inference::{backward, forward, map_decode, mpm_decode, posterior_marginals};
use chainlab::verify::{
    self, check_crf, check_hmm_sequence, check_potential_chain, observation_cases, Checks, Report,
    SuiteConfig,
};
use chainlab::random;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check_line(report: &Report, name: &str, tolerance: f64) -> (bool, String) {
    match report.check(name) {
        Some(c) if c.cases > 0 => {
            let ok = c.passed && c.tolerance == tolerance;
            (ok, format!("{name}: max {:.3e} over {} cases (tol {tolerance:e})", c.max_deviation, c.cases))
        }
        _ => (false, format!("{name}: no cases")),
    }
}

fn from_checks(report: &Report, wanted: &[(&str, f64)], elapsed: Duration, budget: Duration) -> Outcome {
    let mut passed = elapsed < budget;
    let mut parts = Vec::new();
    for &(name, tol) in wanted {
        let (ok, line) = check_line(report, name, tol);
        passed &= ok;
        parts.push(line);
    }
    parts.push(format!("{:.2}s (budget {}s)", elapsed.as_secs_f64(), budget.as_secs()));
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

/// Criteria 2, 3, 5 and 6 share the random HMM suite.
fn hmm_suite(config: &SuiteConfig) -> (Report, Duration) {
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut rng = random::seeded(config.seed.wrapping_add(3));
    let models = verify::random_hmm_suite(config);
    assert_eq!(models.len(), 200);
    for model in &models {
        let len = model.length().expect("per-position suite");
        for y in observation_cases(&mut rng, model.num_observations(), len) {
            check_hmm_sequence(model, &y, config.cap, &mut checks).expect("suite model checks");
        }
    }
    (checks.into_report(config.seed), start.elapsed())
}

fn criterion_1(config: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let crfs = verify::random_crf_suite(config);
    assert_eq!(crfs.len(), 100);
    for crf in &crfs {
        check_crf(crf, config.cap, &mut checks).expect("CRF checks");
    }
    from_checks(
        &checks.into_report(config.seed),
        &[("crf-to-hmm-posterior", 1e-10)],
        start.elapsed(),
        Duration::from_secs(30),
    )
}

fn criterion_4(config: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let chains = verify::random_chain_suite(config);
    assert_eq!(chains.len(), 100);
    for chain in &chains {
        check_potential_chain(chain, config.cap, &mut checks).expect("chain checks");
    }
    from_checks(
        &checks.into_report(config.seed),
        &[("lemma-proportionality", 1e-10)],
        start.elapsed(),
        Duration::from_secs(30),
    )
}

/// Long stationary sequences: every decoder finite, MPM identical.
fn criterion_7() -> Outcome {
    let budget = Duration::from_secs(5);
    let mut passed = true;
    let mut slowest = Duration::ZERO;
    let mut notes = Vec::new();
    for seed in 0..3u64 {
        let mut rng = random::seeded(700 + seed);
        let model = random::hmm(&mut rng, 10, 50, None);
        let y = random::observations(&mut rng, 50, 1000);
        let start = Instant::now();
        let alpha = forward(&model, &y).unwrap();
        let beta = backward(&model, &y).unwrap();
        let marginals = posterior_marginals(&model, &y).unwrap();
        let gen_mpm = mpm_decode(&model, &y).unwrap();
        let (gen_path, gen_score) = map_decode(&model, &y).unwrap();
        let params = derive_disc_params(&model, y.len()).unwrap();
        let disc_marginals = disc_posterior_marginals(&params, &y).unwrap();
        let disc_mpm = disc_mpm_decode(&params, &y).unwrap();
        let (disc_path, disc_score) = disc_viterbi(&params, &y).unwrap();
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);

        let finite_tables = [&alpha, &beta]
            .iter()
            .all(|t| t.columns().iter().flatten().all(|v| v.is_finite()));
        let finite_marginals = marginals
            .iter()
            .chain(&disc_marginals)
            .flat_map(|c| c.probs())
            .all(|p| p.is_finite());
        let finite_scores = gen_score.is_finite() && disc_score.is_finite();
        let attained = (model.joint_log_prob(&disc_path, &y).unwrap() - gen_score).abs();
        let ok = finite_tables && finite_marginals && finite_scores && gen_mpm == disc_mpm && elapsed < budget;
        if !ok {
            notes.push(format!(
                "seed {seed}: finite tables {finite_tables}, marginals {finite_marginals}, scores {finite_scores}, mpm equal {}",
                gen_mpm == disc_mpm
            ));
        }
        passed &= ok;
        notes.push(format!(
            "seed {seed}: log p(y, x̂) = {gen_score:.3}, disc path gap {attained:.1e}, paths equal {}",
            gen_path == disc_path
        ));
    }
    notes.push(format!("slowest sequence {:.3}s (budget 5s)", slowest.as_secs_f64()));
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

/// Fit, tag in all four combinations, compare MPM outputs and goldens, verify.
fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_chainlab");
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("toy_hmm.json");
    let mut notes = Vec::new();
    let mut passed = true;

    let fit = Command::new(bin)
        .args(["fit", "--k", "0.1", "--corpus"])
        .arg(fixtures.join("toy_corpus.tsv"))
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap();
    passed &= fit.status.success();

    let mut outputs = std::collections::BTreeMap::new();
    for decoder in ["mpm", "map"] {
        for mode in ["generative", "discriminative"] {
            let run = || {
                Command::new(bin)
                    .args(["tag", "--decoder", decoder, "--mode", mode, "--model"])
                    .arg(&model)
                    .arg("--input")
                    .arg(fixtures.join("tag_input.txt"))
                    .output()
                    .unwrap()
            };
            let (a, b) = (run(), run());
            let golden = std::fs::read(fixtures.join(format!("golden/tag_{decoder}_{mode}.tsv"))).unwrap();
            let stable = a.status.success() && a.stdout == b.stdout && a.stdout == golden;
            if !stable {
                notes.push(format!("{decoder}/{mode} not byte-stable against golden"));
            }
            passed &= stable;
            outputs.insert((decoder, mode), a.stdout);
        }
    }
    // MPM identity on the tag input and on the whole training corpus
    let corpus_mpm = |mode: &str| {
        Command::new(bin)
            .args(["tag", "--mode", mode, "--model"])
            .arg(&model)
            .arg("--input")
            .arg(fixtures.join("toy_corpus.tsv"))
            .output()
            .unwrap()
            .stdout
    };
    let corpus_gen = corpus_mpm("generative");
    let mpm_equal = outputs[&("mpm", "generative")] == outputs[&("mpm", "discriminative")]
        && !corpus_gen.is_empty()
        && corpus_gen == corpus_mpm("discriminative");
    passed &= mpm_equal;
    let tokens = [&outputs[&("mpm", "generative")], &corpus_gen]
        .iter()
        .map(|o| String::from_utf8_lossy(o).lines().filter(|l| !l.is_empty()).count())
        .sum::<usize>();

    let verify = Command::new(bin).arg("verify").arg("--model").arg(&model).output().unwrap();
    passed &= verify.status.code() == Some(0);
    notes.push(format!(
        "fit exit {:?}; 4 tag runs byte-stable; MPM generative == discriminative on {tokens} tokens: {mpm_equal}; verify exit {:?}",
        fit.status.code(),
        verify.status.code()
    ));
    Outcome {
        passed,
        detail: notes.join("; "),
    }
}

fn main() {
    let config = SuiteConfig::default();
    let (hmm, hmm_time) = hmm_suite(&config);
    let budget = Duration::from_secs(30);
    let outcomes = [
        ("1 CRF-to-HMM posterior equivalence", criterion_1(&config)),
        (
            "2 discriminative marginals equal generative",
            from_checks(&hmm, &[("discriminative-marginals", 1e-10), ("marginals-vs-oracle", 1e-10)], hmm_time, budget),
        ),
        (
            "3 discriminative Viterbi",
            from_checks(
                &hmm,
                &[("discriminative-viterbi-score", 1e-10), ("discriminative-viterbi-path", 0.0)],
                hmm_time,
                budget,
            ),
        ),
        ("4 Markov chain from potentials", criterion_4(&config)),
        (
            "5 forward-backward correctness",
            from_checks(
                &hmm,
                &[("forward-backward-constancy", 1e-9), ("forward-backward-evidence", 1e-10)],
                hmm_time,
                budget,
            ),
        ),
        (
            "6 invariance to the local factor scale",
            from_checks(
                &hmm,
                &[
                    ("scale-invariance-marginals", 1e-10),
                    ("scale-invariance-mpm", 0.0),
                    ("scale-invariance-viterbi", 0.0),
                ],
                hmm_time,
                budget,
            ),
        ),
        ("7 numerical robustness at N = 1000", criterion_7()),
        ("8 end-to-end CLI", criterion_8()),
    ];
    let mut failed = 0;
    for (name, o) in &outcomes {
        println!("criterion {name}: {} — {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
