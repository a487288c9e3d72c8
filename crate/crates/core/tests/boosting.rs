use proptest::prelude::*;
use qboost::circuits::{Architecture, QnnArchitecture};
use qboost::ensemble::{
    adaboost_m1, adaboost_q, alpha_from_masses, combine, confidence_masses, tune_c, update_weights, BoostConfig, CGrid,
    FittedMember, Voting, WeakLearner,
};
use qboost::rng::{derive, Stream};
use qboost::Result;
use rand::Rng;

fn random_probs<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0f64).powi(3)).collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|x| x / z).collect()
        })
        .collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Replays fixed class distributions and records the weights it was handed.
struct Scripted {
    k: usize,
    rounds: Vec<Vec<Vec<f64>>>,
    seen: Vec<Vec<f64>>,
}

impl WeakLearner for Scripted {
    fn architecture(&self) -> Architecture {
        Architecture::Qnn(QnnArchitecture {
            n_qubits: 4,
            n_layers: 1,
            n_classes: self.k,
            measured_qubits: vec![0, 1, 2, 3],
            gate_order: Default::default(),
        })
    }

    fn fit(&mut self, round: usize, weights: &[f64]) -> Result<FittedMember> {
        self.seen.push(weights.to_vec());
        Ok(FittedMember {
            params: vec![round as f64],
            train_probs: self.rounds[round].clone(),
            test_probs: None,
            metrics: Vec::new(),
        })
    }
}

/// Members that are right on a random ~60% of samples.
fn scripted<R: Rng>(n: usize, k: usize, rounds: usize, rng: &mut R) -> (Scripted, Vec<usize>) {
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let rounds = (0..rounds)
        .map(|_| {
            let mut probs = random_probs(n, k, rng);
            for (p, &y) in probs.iter_mut().zip(&labels) {
                if rng.random_bool(0.6) {
                    p[y] += 1.5;
                    let z: f64 = p.iter().sum();
                    p.iter_mut().for_each(|x| *x /= z);
                }
            }
            probs
        })
        .collect();
    (Scripted { k, rounds, seen: Vec::new() }, labels)
}

/// Exhaustive search over the grid with the documented tie rule.
fn brute_tune(
    alphas: &[f64],
    members: &[Vec<Vec<f64>>],
    new: &[Vec<f64>],
    w: &[f64],
    labels: &[usize],
    grid: &[f64],
) -> (f64, usize) {
    let (mut pt, mut pf) = (0.0, 0.0);
    for i in 0..labels.len() {
        let k = argmax(&new[i]);
        if k == labels[i] {
            pt += w[i] * new[i][k];
        } else {
            pf += w[i] * new[i][k];
        }
    }
    let score = |c: f64| {
        let a = (c * pt / pf).ln();
        (0..labels.len())
            .filter(|&i| {
                let mut s = vec![0.0; new[i].len()];
                for (al, m) in alphas.iter().zip(members) {
                    s.iter_mut().zip(&m[i]).for_each(|(s, p)| *s += al * p);
                }
                s.iter_mut().zip(&new[i]).for_each(|(s, p)| *s += a * p);
                argmax(&s) == labels[i]
            })
            .count()
    };
    let mut cands: Vec<(usize, f64)> = grid.iter().map(|&c| (score(c), c)).collect();
    cands.push((score(1.0), 1.0));
    let top = cands.iter().map(|x| x.0).max().unwrap();
    let c = cands
        .iter()
        .filter(|x| x.0 == top)
        .map(|x| x.1)
        .min_by(|a, b| ((a - 1.0).abs(), *a).partial_cmp(&((b - 1.0).abs(), *b)).unwrap())
        .unwrap();
    (c, top)
}

#[test]
fn tune_c_agrees_with_exhaustive_search() {
    let mut rng = derive(31, Stream::Corpus, 0);
    let grid = CGrid::default();
    let values = grid.values();
    for _ in 0..25 {
        let (n, k) = (rng.random_range(5..40), rng.random_range(2..5));
        let (script, labels) = scripted(n, k, 3, &mut rng);
        let alphas = [rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)];
        let w = {
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
            let z: f64 = raw.iter().sum();
            raw.iter().map(|x| x / z).collect::<Vec<_>>()
        };
        let new = &script.rounds[2];
        let (preds, confs): (Vec<usize>, Vec<f64>) = new.iter().map(|p| (argmax(p), p[argmax(p)])).unzip();
        let masses = confidence_masses(&w, &preds, &confs, &labels);
        if masses.0 <= 0.0 || masses.1 <= 0.0 {
            continue;
        }
        let partial: Vec<&[Vec<f64>]> = script.rounds[..2].iter().map(Vec::as_slice).collect();
        let t = tune_c(&alphas, &partial, new, masses, &labels, &grid, 1e6);
        let (c, correct) = brute_tune(&alphas, &script.rounds[..2], new, &w, &labels, &values);
        assert_eq!(t.correct, correct);
        assert!((t.c - c).abs() < 1e-12, "tuned {} vs brute {c}", t.c);
        assert!(t.correct >= t.correct_at_one);
        assert!((t.alpha - (t.c * masses.0 / masses.1).ln()).abs() < 1e-12);
    }
}

#[test]
fn adaboost_q_reweights_by_confidence_and_starts_at_c_one() {
    let mut rng = derive(32, Stream::Corpus, 0);
    let (mut learner, labels) = scripted(60, 4, 4, &mut rng);
    let rounds = learner.rounds.clone();
    let out = adaboost_q(&mut learner, &labels, None, &BoostConfig::new(4)).unwrap();
    assert_eq!(out.rounds[0].c, 1.0);
    // Independent replay of the weight recursion.
    let mut w = vec![1.0 / 60.0; 60];
    for (r, log) in out.rounds.iter().enumerate() {
        for (a, b) in w.iter().zip(&learner.seen[r]) {
            assert!((a - b).abs() < 1e-15);
        }
        let probs = &rounds[r];
        let (mut pt, mut pf) = (0.0, 0.0);
        for i in 0..60 {
            let k = argmax(&probs[i]);
            let m = w[i] * probs[i][k];
            if k == labels[i] {
                pt += m
            } else {
                pf += m
            }
        }
        assert!((log.alpha - (log.c * pt / pf).ln()).abs() < 1e-12);
        let next: Vec<f64> = (0..60)
            .map(|i| {
                let k = argmax(&probs[i]);
                w[i] * if k == labels[i] { (-probs[i][k]).exp() } else { probs[i][k].exp() }
            })
            .collect();
        let z: f64 = next.iter().sum();
        w = next.iter().map(|x| x / z).collect();
    }
    // Soft vote of the accepted members.
    let alphas = out.model.alphas();
    let mut correct = 0;
    for i in 0..60 {
        let rows: Vec<&[f64]> = rounds.iter().take(alphas.len()).map(|m| m[i].as_slice()).collect();
        let mut s = vec![0.0; 4];
        for (a, row) in alphas.iter().zip(&rows) {
            s.iter_mut().zip(row.iter()).for_each(|(s, p)| *s += a * p);
        }
        assert_eq!(combine(&alphas, &rows, 4, Voting::Soft), argmax(&s));
        correct += usize::from(argmax(&s) == labels[i]);
    }
    assert!((out.rounds.last().unwrap().train_accuracy - correct as f64 / 60.0).abs() < 1e-12);
}

#[test]
fn adaboost_m1_uses_samme_weights() {
    let mut rng = derive(33, Stream::Corpus, 0);
    let (mut learner, labels) = scripted(50, 3, 3, &mut rng);
    let rounds = learner.rounds.clone();
    let out = adaboost_m1(&mut learner, &labels, None, &BoostConfig::new(3), Voting::Hard).unwrap();
    let mut w = vec![1.0 / 50.0; 50];
    for (r, log) in out.rounds.iter().enumerate() {
        let wrong: Vec<bool> = (0..50).map(|i| argmax(&rounds[r][i]) != labels[i]).collect();
        let e: f64 = (0..50).filter(|&i| wrong[i]).map(|i| w[i]).sum();
        let alpha = ((1.0 - e) / e).ln() + 2f64.ln();
        assert!((log.alpha - alpha).abs() < 1e-12);
        assert_eq!(log.c, 1.0);
        let next: Vec<f64> = (0..50).map(|i| if wrong[i] { w[i] * alpha.exp() } else { w[i] }).collect();
        let z: f64 = next.iter().sum();
        w = next.iter().map(|x| x / z).collect();
    }
}

#[test]
fn single_round_is_the_member_itself() {
    let mut rng = derive(34, Stream::Corpus, 0);
    let (mut learner, labels) = scripted(30, 5, 1, &mut rng);
    let out = adaboost_q(&mut learner, &labels, None, &BoostConfig::new(1)).unwrap();
    assert_eq!(out.model.len(), 1);
    assert_eq!(out.rounds[0].train_accuracy, out.rounds[0].member_train_accuracy);
}

#[test]
fn useless_member_stops_early() {
    // Every prediction wrong: zero confidence mass on correct samples.
    let labels = vec![0usize; 10];
    let mut learner = Scripted {
        k: 2,
        rounds: vec![vec![vec![0.8, 0.2]; 10], vec![vec![0.1, 0.9]; 10], vec![vec![0.8, 0.2]; 10]],
        seen: Vec::new(),
    };
    let out = adaboost_q(&mut learner, &labels, None, &BoostConfig::new(3)).unwrap();
    assert!(out.stopped_early);
    assert_eq!(out.model.len(), 1);
    assert_eq!(out.rounds.len(), 2);
    assert!(!out.rounds[1].accepted);
}

#[test]
fn weak_first_member_is_kept_as_is() {
    // Two of ten right: the first weight is negative for both rules.
    let labels: Vec<usize> = (0..10).map(|i| i % 4).collect();
    let probs: Vec<Vec<f64>> = labels
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let top = if i < 2 { y } else { (y + 1) % 4 };
            (0..4).map(|k| if k == top { 0.7 } else { 0.1 }).collect()
        })
        .collect();
    let single: Vec<usize> = probs.iter().map(|p| argmax(p)).collect();
    for early_stop in [true, false] {
        let config = BoostConfig { early_stop, ..BoostConfig::new(3) };
        let mut q = Scripted { k: 4, rounds: vec![probs.clone(); 3], seen: Vec::new() };
        let out = adaboost_q(&mut q, &labels, None, &config).unwrap();
        let mut m1 = Scripted { k: 4, rounds: vec![probs.clone(); 3], seen: Vec::new() };
        let out_m1 = adaboost_m1(&mut m1, &labels, None, &config, Voting::Soft).unwrap();
        for o in [out, out_m1] {
            assert!(o.rounds[0].alpha < 0.0);
            assert!(o.stopped_early && o.rounds.len() == 1 && o.model.len() == 1);
            assert_eq!(o.model.members[0].alpha, 1.0);
            assert_eq!(o.model.predict_cached(&o.train_probs).unwrap(), single);
            assert_eq!(o.rounds[0].train_accuracy, 0.2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reweighting_keeps_a_positive_distribution(seed in any::<u64>(), n in 1usize..200, k in 2usize..11) {
        let mut rng = derive(seed, Stream::Corpus, 0);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut w = vec![1.0 / n as f64; n];
        for _ in 0..6 {
            let probs = random_probs(n, k, &mut rng);
            let (preds, confs): (Vec<usize>, Vec<f64>) = probs.iter().map(|p| (argmax(p), p[argmax(p)])).unzip();
            w = update_weights(&w, &preds, &confs, &labels).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn alpha_is_monotone_in_c(pt in 1e-6f64..1.0, pf in 1e-6f64..1.0, c1 in 0.5f64..2.0, c2 in 0.5f64..2.0) {
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        prop_assert!(alpha_from_masses(pt, pf, lo, 50.0) <= alpha_from_masses(pt, pf, hi, 50.0));
        prop_assert!((alpha_from_masses(pt, pf, 1.0, 50.0) - (pt / pf).ln()).abs() < 1e-12);
    }

    #[test]
    fn boosting_weights_stay_normalized(seed in any::<u64>()) {
        let mut rng = derive(seed, Stream::Corpus, 0);
        let (mut learner, labels) = scripted(40, 3, 4, &mut rng);
        let out = adaboost_q(&mut learner, &labels, None, &BoostConfig::new(4)).unwrap();
        prop_assert_eq!(out.rounds[0].c, 1.0);
        for w in &out.weights {
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|&x| x > 0.0));
        }
        // Tuned c never loses training accuracy against c = 1.
        let alphas = out.model.alphas();
        for r in 1..alphas.len() {
            let (mut pt, mut pf) = (0.0, 0.0);
            for ((p, &y), w) in learner.rounds[r].iter().zip(&labels).zip(&out.weights[r]) {
                let k = argmax(p);
                if k == y { pt += w * p[k] } else { pf += w * p[k] }
            }
            let mut at_one = alphas[..r].to_vec();
            at_one.push((pt / pf).ln());
            let correct = (0..40)
                .filter(|&i| {
                    let rows: Vec<&[f64]> = learner.rounds[..=r].iter().map(|m| m[i].as_slice()).collect();
                    combine(&at_one, &rows, 3, Voting::Soft) == labels[i]
                })
                .count();
            prop_assert!(out.rounds[r].train_accuracy >= correct as f64 / 40.0 - 1e-12);
        }
    }
}
