//! Values checked against the brute-force oracle on fixed-seed instances.

use chainlab::corpus::{fit_disc_params, fit_hmm, parse_corpus};
use chainlab::discriminative::{derive_disc_params, disc_mpm_decode, disc_posterior_marginals, disc_viterbi};
use chainlab::equivalence::{convert_crf_to_hmm, gamma_backward, hmm_to_crf, psi};
use chainlab::inference::{backward, forward, log_evidence, map_decode, mpm_decode, posterior_marginals};
use chainlab::lemma::{lemma_backward, markov_from_potentials};
use chainlab::logspace::log_sum_exp_iter;
use chainlab::oracle::{self, DEFAULT_CAP};
use chainlab::random;

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() < tol,
        "{what}: got {got}, want {want}, diff {}",
        (got - want).abs()
    );
}

#[test]
fn joint_log_prob_matches_direct_product() {
    let m = random::hmm(&mut random::seeded(101), 3, 2, Some(4));
    for y in oracle::sequences(2, 4) {
        for x in oracle::sequences(3, 4) {
            let got = m.joint_log_prob(&x, &y).unwrap();
            assert_close(got, oracle::joint_prob(&m, &x, &y).ln(), 1e-12, "log p(x, y)");
        }
    }
}

#[test]
fn crf_score_matches_direct_sum() {
    let crf = random::crf(&mut random::seeded(102), 3, 2, 4, 2.0);
    for y in oracle::sequences(2, 4) {
        for x in oracle::sequences(3, 4) {
            let got = crf.unnormalized_log_score(&x, &y).unwrap();
            assert_close(got, oracle::crf_score(&crf, &x, &y), 1e-12, "score");
        }
    }
}

#[test]
fn log_partition_matches_enumeration() {
    let crf = random::crf(&mut random::seeded(103), 3, 2, 5, 2.0);
    for y in oracle::sequences(2, 5) {
        let z = oracle::crf_partition(&crf, &y, DEFAULT_CAP).unwrap();
        assert_close(crf.log_partition(&y).unwrap(), z.ln(), 1e-10, "log κ");
    }
}

#[test]
fn crf_posterior_matches_enumeration() {
    let crf = random::crf(&mut random::seeded(104), 3, 3, 4, 2.0);
    for y in [vec![0, 1, 2, 0], vec![2, 2, 2, 2], vec![1, 0, 0, 2]] {
        let want = oracle::enumerate_crf_posterior(&crf, &y, DEFAULT_CAP).unwrap();
        for (x, p) in want {
            let got = crf.posterior_log_prob(&x, &y).unwrap().exp();
            assert_close(got, p, 1e-10, "p(x | y)");
        }
    }
}

#[test]
fn lemma_beta_matches_suffix_sums() {
    let chain = random::potential_chain(&mut random::seeded(105), 3, 5, 2.0);
    let beta = lemma_backward(&chain);
    let want = oracle::potential_suffix_sums(&chain, DEFAULT_CAP).unwrap();
    for (n, row) in want.iter().enumerate() {
        for (w, &b) in row.iter().enumerate() {
            // relative comparison through the log
            assert_close(beta[n][w], b.ln(), 1e-10, "log β");
        }
    }
}

#[test]
fn induced_chain_matches_normalized_potentials() {
    let chain = random::potential_chain(&mut random::seeded(106), 3, 4, 2.0);
    let markov = markov_from_potentials(&chain).unwrap();
    let law = oracle::enumerate_potential_law(&chain, DEFAULT_CAP).unwrap();
    assert_eq!(law.len(), 81);
    for (w, p) in law {
        assert_close(markov.log_prob(&w).exp(), p, 1e-10, "p(w)");
    }
}

#[test]
fn gamma_matches_suffix_enumeration() {
    let crf = random::crf(&mut random::seeded(107), 3, 2, 4, 2.0);
    let gamma = gamma_backward(&crf);
    let want = oracle::crf_gamma(&crf, DEFAULT_CAP).unwrap();
    for (n, table) in want.iter().enumerate() {
        for (x, row) in table.iter().enumerate() {
            for (y, &g) in row.iter().enumerate() {
                assert_close(gamma.at(n).get(x, y), g.ln(), 1e-10, "log γ");
            }
        }
    }
}

#[test]
fn psi_matches_direct_sum() {
    let crf = random::crf(&mut random::seeded(108), 3, 3, 4, 2.0);
    let gamma = gamma_backward(&crf);
    let g = oracle::crf_gamma(&crf, DEFAULT_CAP).unwrap();
    for step in 0..3 {
        let got = psi(&gamma, &crf, step).unwrap();
        for (x, &v) in got.iter().enumerate() {
            let direct: f64 = (0..3)
                .map(|y| crf.unary(step + 1).get(x, y).exp() * g[step + 1][x][y])
                .sum();
            assert!(
                (v.exp() - direct).abs() < 1e-12 * direct.max(1.0),
                "ψ at step {step}, label {x}: {} vs {direct}",
                v.exp()
            );
        }
    }
    assert!(psi(&gamma, &crf, 3).is_err());
}

#[test]
fn converted_hmm_has_crf_posterior_for_every_observation() {
    let crf = random::crf(&mut random::seeded(109), 3, 2, 4, 2.0);
    let hmm = convert_crf_to_hmm(&crf).unwrap();
    let mut count = 0;
    for y in oracle::sequences(2, 4) {
        let want = oracle::enumerate_crf_posterior(&crf, &y, DEFAULT_CAP).unwrap();
        let got = oracle::enumerate_hmm_posterior(&hmm, &y, DEFAULT_CAP).unwrap();
        let dev = want
            .iter()
            .map(|(x, p)| (p - got[x]).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "y = {y:?}: deviation {dev}");
        count += 1;
    }
    assert_eq!(count, 16);
}

#[test]
fn hmm_to_crf_and_back_preserves_posterior() {
    let hmm = random::hmm(&mut random::seeded(110), 3, 2, None);
    let crf = hmm_to_crf(&hmm, 4).unwrap();
    let back = convert_crf_to_hmm(&crf).unwrap();
    for y in oracle::sequences(2, 4) {
        let a = oracle::enumerate_hmm_posterior(&hmm, &y, DEFAULT_CAP).unwrap();
        let b = oracle::enumerate_hmm_posterior(&back, &y, DEFAULT_CAP).unwrap();
        for (x, p) in &a {
            assert_close(b[x], *p, 1e-10, "round-trip posterior");
        }
    }
}

#[test]
fn forward_sum_is_evidence() {
    let m = random::hmm(&mut random::seeded(111), 3, 2, Some(5));
    for y in oracle::sequences(2, 5) {
        let alpha = forward(&m, &y).unwrap();
        let want = oracle::hmm_evidence(&m, &y, DEFAULT_CAP).unwrap();
        let got = log_sum_exp_iter(alpha.at(4).iter().copied()).exp();
        assert!((got - want).abs() < 1e-10 * want, "p(y): {got} vs {want}");
        assert_close(log_evidence(&m, &y).unwrap(), want.ln(), 1e-10, "log p(y)");
    }
}

#[test]
fn alpha_beta_columns_constant() {
    let m = random::hmm(&mut random::seeded(112), 3, 3, None);
    let y = [0, 2, 1, 1, 0, 2];
    let (alpha, beta) = (forward(&m, &y).unwrap(), backward(&m, &y).unwrap());
    let want = oracle::hmm_evidence(&m, &y, DEFAULT_CAP).unwrap();
    for n in 0..y.len() {
        let s = log_sum_exp_iter(alpha.at(n).iter().zip(beta.at(n)).map(|(a, b)| a + b)).exp();
        assert!((s - want).abs() < 1e-10 * want, "column {n}: {s} vs {want}");
    }
}

#[test]
fn marginals_and_decoders_match_enumeration() {
    let m = random::hmm(&mut random::seeded(113), 3, 3, Some(5));
    for y in [vec![0, 1, 2, 1, 0], vec![2, 2, 0, 0, 1], vec![1, 1, 1, 1, 1]] {
        let want = oracle::hmm_marginals(&m, &y, DEFAULT_CAP).unwrap();
        let got = posterior_marginals(&m, &y).unwrap();
        for (g, w) in got.iter().zip(&want) {
            for (a, b) in g.probs().iter().zip(w) {
                assert_close(*a, *b, 1e-10, "marginal");
            }
        }
        let oracle_mpm: Vec<usize> = want
            .iter()
            .map(|w| chainlab::logspace::argmax_first(w))
            .collect();
        assert_eq!(mpm_decode(&m, &y).unwrap(), oracle_mpm);

        let (path, score) = map_decode(&m, &y).unwrap();
        let best = oracle::hmm_map(&m, &y, DEFAULT_CAP).unwrap();
        assert_close(score, best.best.ln(), 1e-10, "MAP score");
        assert_close(m.joint_log_prob(&path, &y).unwrap(), score, 1e-10, "MAP attained");
    }
}

#[test]
fn derived_priors_match_label_chain_enumeration() {
    let m = random::hmm(&mut random::seeded(114), 3, 2, Some(5));
    let p = derive_disc_params(&m, 5).unwrap();
    let mut marg = vec![vec![0.0; 3]; 5];
    for x in oracle::sequences(3, 5) {
        let mut w = m.initial().prob(x[0]);
        for n in 1..5 {
            w *= m.transition_at(n - 1).prob(x[n - 1], x[n]);
        }
        for (n, &xn) in x.iter().enumerate() {
            marg[n][xn] += w;
        }
    }
    for (n, row) in marg.iter().enumerate() {
        for (x, &v) in row.iter().enumerate() {
            assert_close(p.prior_at(n).prob(x), v, 1e-12, "p(xₙ)");
        }
    }
}

#[test]
fn discriminative_decoders_agree_with_generative() {
    let m = random::hmm(&mut random::seeded(115), 3, 3, Some(5));
    let p = derive_disc_params(&m, 5).unwrap();
    let mut unique = 0;
    for y in oracle::sequences(3, 5) {
        let want = oracle::hmm_marginals(&m, &y, DEFAULT_CAP).unwrap();
        for (g, w) in disc_posterior_marginals(&p, &y).unwrap().iter().zip(&want) {
            for (a, b) in g.probs().iter().zip(w) {
                assert_close(*a, *b, 1e-10, "discriminative marginal");
            }
        }
        assert_eq!(disc_mpm_decode(&p, &y).unwrap(), mpm_decode(&m, &y).unwrap());

        let (gen_path, gen_score) = map_decode(&m, &y).unwrap();
        let (disc_path, _) = disc_viterbi(&p, &y).unwrap();
        assert_close(m.joint_log_prob(&disc_path, &y).unwrap(), gen_score, 1e-10, "Viterbi score");
        if oracle::hmm_map(&m, &y, DEFAULT_CAP).unwrap().is_unique_by(1e-9) {
            assert_eq!(disc_path, gen_path);
            unique += 1;
        }
    }
    assert!(unique > 200, "only {unique} unique cases");
}

#[test]
fn oracle_and_recursions_round_differently() {
    // The oracle is an independent computation, so on some fuzz case the
    // last bits must differ from the log-space recursion.
    let mut differing = 0;
    for seed in 0..20 {
        let m = random::hmm(&mut random::seeded(seed), 3, 3, Some(5));
        let y = random::observations(&mut random::seeded(seed + 1000), 3, 5);
        let fast = log_evidence(&m, &y).unwrap();
        let slow = oracle::hmm_evidence(&m, &y, DEFAULT_CAP).unwrap().ln();
        assert_close(fast, slow, 1e-10, "log p(y)");
        differing += (fast.to_bits() != slow.to_bits()) as usize;
    }
    assert!(differing > 0);
}

#[test]
fn oracle_joint_mass_is_one() {
    let m = random::hmm(&mut random::seeded(116), 3, 3, Some(4));
    let total: f64 = oracle::enumerate_joint(&m, 4, DEFAULT_CAP).unwrap().values().sum();
    assert_close(total, 1.0, 1e-9, "joint mass");
    let crf = random::crf(&mut random::seeded(117), 3, 2, 4, 2.0);
    let total: f64 = oracle::enumerate_crf_posterior(&crf, &[0, 1, 1, 0], DEFAULT_CAP)
        .unwrap()
        .values()
        .sum();
    assert_close(total, 1.0, 1e-9, "CRF posterior mass");
}

const HAND_CORPUS: &str = "a\tX\nb\tY\na\tX\n\nb\tY\nb\tX\n";

#[test]
fn fit_hmm_matches_hand_tally() {
    // labels X=0, Y=1; tokens a=0, b=1, <unk>=2
    let corpus = parse_corpus(HAND_CORPUS, None).unwrap();
    let m = fit_hmm(&corpus, 1.0).unwrap();
    let expect = |got: &[f64], want: &[f64]| {
        for (g, w) in got.iter().zip(want) {
            assert_close(*g, *w, 1e-12, "estimate");
        }
    };
    expect(m.initial().probs(), &[0.5, 0.5]);
    expect(m.transition_at(0).row(0), &[1.0 / 3.0, 2.0 / 3.0]);
    expect(m.transition_at(0).row(1), &[3.0 / 4.0, 1.0 / 4.0]);
    expect(m.emission_at(0).row(0), &[3.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0]);
    expect(m.emission_at(0).row(1), &[1.0 / 5.0, 3.0 / 5.0, 1.0 / 5.0]);
}

#[test]
fn fit_disc_params_matches_hand_tally() {
    let corpus = parse_corpus(HAND_CORPUS, None).unwrap();
    let p = fit_disc_params(&corpus, 1.0).unwrap();
    let expect = |got: &[f64], want: &[f64]| {
        for (g, w) in got.iter().zip(want) {
            assert_close(*g, *w, 1e-12, "estimate");
        }
    };
    expect(p.prior_at(0).probs(), &[4.0 / 7.0, 3.0 / 7.0]);
    expect(p.prior_at(3).probs(), &[4.0 / 7.0, 3.0 / 7.0]);
    expect(p.transition_at(0).row(0), &[1.0 / 3.0, 2.0 / 3.0]);
    expect(p.label_given_obs_at(0).row(0), &[3.0 / 4.0, 1.0 / 4.0]);
    expect(p.label_given_obs_at(0).row(1), &[2.0 / 5.0, 3.0 / 5.0]);
    expect(p.label_given_obs_at(0).row(2), &[4.0 / 7.0, 3.0 / 7.0]);
}

#[test]
fn estimators_coincide_on_balanced_corpus() {
    // Stationary label chain whose propagated prior equals the unigram, and
    // every token seen: Bayes inversion of counts equals direct counts.
    let text = "a\tX\nc\tY\n\nc\tY\nb\tX\n\nc\tX\nb\tY\n\nb\tY\na\tX\n";
    let corpus = parse_corpus(text, None).unwrap();
    let hmm = fit_hmm(&corpus, 0.0).unwrap();
    let derived = derive_disc_params(&hmm, 2).unwrap();
    let direct = fit_disc_params(&corpus, 0.0).unwrap();
    assert_eq!(derived.transition_at(0), direct.transition_at(0));
    for n in 0..2 {
        for y in 0..corpus.observations.len() + 1 {
            for x in 0..2 {
                assert_close(
                    derived.label_given_obs_at(n).prob(y, x),
                    direct.label_given_obs_at(n).prob(y, x),
                    1e-12,
                    "p(x|y)",
                );
            }
        }
    }
}

#[test]
fn smoothing_moves_rows_toward_uniform() {
    let corpus = parse_corpus(HAND_CORPUS, None).unwrap();
    let cells: Vec<f64> = [0.0, 0.5, 1.0, 10.0, 1000.0]
        .iter()
        .map(|&k| fit_hmm(&corpus, k).unwrap().transition_at(0).prob(0, 1))
        .collect();
    assert!(cells.windows(2).all(|w| w[1] < w[0]), "{cells:?}");
    assert!((cells[4] - 0.5).abs() < 1e-3);
}
