mod common;

use common::*;
use mqubo::graph::{barabasi_albert, Graph};
use mqubo::problems::{self, Family, GeneratorConfig};
use mqubo::BinaryVector;

fn cut_value(n: usize, weights: &[(usize, usize, f64)], x: &[u8]) -> f64 {
    assert!(weights.iter().all(|&(i, j, _)| i < n && j < n));
    weights.iter().filter(|&&(i, j, _)| x[i] != x[j]).map(|&(_, _, w)| w).sum()
}

fn eval(q: &mqubo::QuboInstance, x: &[u8]) -> f64 {
    q.evaluate(&BinaryVector::new(x.to_vec()).unwrap()).unwrap()
}

#[test]
fn maxcut_objective_is_negated_cut() {
    let g = barabasi_albert(10, 2, 11).unwrap();
    for family in [Family::Mc01, Family::Mcb, Family::Mcz] {
        let seed = problems::family_seed(5, family);
        let weights = match family {
            Family::Mc01 => problems::mc01_weights(&g, seed),
            Family::Mcb => problems::mcb_weights(&g, seed),
            _ => problems::mcz_weights(&g, seed),
        };
        let q = problems::generate(family, &g, 5).unwrap();
        for k in 0..1u64 << 10 {
            let x = bits_of(k, 10);
            let want = -cut_value(10, &weights, &x);
            assert!(rel_close(eval(&q, &x), want, 1e-12), "{family} {k}");
        }
    }
}

#[test]
fn cut_is_symmetric_under_complement() {
    let g = barabasi_albert(12, 2, 4).unwrap();
    let q = problems::generate(Family::Mcz, &g, 9).unwrap();
    let mut r = rng(1);
    for _ in 0..100 {
        let x: Vec<u8> = (0..12).map(|_| rand::Rng::random_range(&mut r, 0..=1)).collect();
        let y: Vec<u8> = x.iter().map(|b| 1 - b).collect();
        assert_eq!(eval(&q, &x), eval(&q, &y));
    }
}

#[test]
fn weight_supports() {
    let g = barabasi_albert(30, 2, 2).unwrap();
    let mc01 = problems::mc01_weights(&g, 1);
    assert_eq!(mc01.len(), g.edges().len());
    assert!(mc01.iter().all(|&(_, _, w)| (0.0..=1.0).contains(&w)));
    let mcb = problems::mcb_weights(&g, 1);
    assert_eq!(mcb.len(), 30 * 29 / 2);
    assert!(mcb.iter().all(|&(i, j, w)| if g.has_edge(i, j) { w == 1.0 } else { w == 0.0 || w == 1.0 }));
    let mcz = problems::mcz_weights(&g, 1);
    assert!(mcz.iter().all(|&(i, j, w)| if g.has_edge(i, j) { w == 5.0 } else { (1.0..=5.0).contains(&w) && w.fract() == 0.0 }));
}

#[test]
fn mc01_weight_moments() {
    let g = barabasi_albert(2000, 3, 8).unwrap();
    let w: Vec<f64> = problems::mc01_weights(&g, 3).into_iter().map(|t| t.2).collect();
    let k = w.len() as f64;
    let mean = w.iter().sum::<f64>() / k;
    let var = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    // Beta(0.2, 0.8): mean 0.2, variance 0.08
    assert!((mean - 0.2).abs() < 0.02, "{mean}");
    assert!((var - 0.08).abs() < 0.01, "{var}");
}

#[test]
fn subsum_identity() {
    let g = barabasi_albert(10, 2, 6).unwrap();
    let w: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
    let tau = problems::subsum_target(&g);
    let q = problems::gen_subsum(&g).unwrap();
    for k in 0..1u64 << 10 {
        let x = bits_of(k, 10);
        let s: f64 = w.iter().zip(&x).map(|(wi, &xi)| wi * xi as f64).sum();
        assert!(rel_close(eval(&q, &x) + tau * tau, (s - tau) * (s - tau), 1e-12));
    }
}

#[test]
fn graph_properties() {
    for seed in 0..5 {
        let g = barabasi_albert(200, 2, seed).unwrap();
        assert_eq!(g.edges().len(), 2 * (200 - 2));
        assert!(g.is_connected());
        assert!(g.edges().iter().all(|&(i, j)| i < j));
    }
    assert!(Graph::new(3, vec![(0, 0)]).is_err());
    assert!(barabasi_albert(3, 3, 0).is_err());
}

#[test]
fn generation_is_deterministic_per_seed() {
    let cfg = GeneratorConfig { n: 25, attach_m: 2, seed: None, families: Family::ALL.to_vec() };
    let a = problems::generate_all(&cfg, 42).unwrap().1;
    let b = problems::generate_all(&cfg, 42).unwrap().1;
    let c = problems::generate_all(&cfg, 43).unwrap().1;
    assert_eq!(a, b);
    assert_ne!(a[0], c[0]);
}

#[test]
fn family_names_parse() {
    for f in Family::ALL {
        assert_eq!(f.code().parse::<Family>().unwrap(), f);
        assert_eq!(f.display_name().parse::<Family>().unwrap(), f);
    }
    assert!("MC2".parse::<Family>().is_err());
}
