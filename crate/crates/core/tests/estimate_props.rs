mod common;

use common::{below, five_net, random_coef, random_network, random_spec};
use gnar_core::design::build_design;
use gnar_core::estimate::{ar_baseline, fit, gls_restricted_estimate, Criterion};
use gnar_core::model::{to_var_matrices, CoefficientSet, ModelSpec};
use gnar_core::network::{Edge, Network};
use gnar_core::sim::{gnar_simulate, SimConfig};
use gnar_core::{Matrix, RngStream, SeriesMatrix};
use nalgebra::DMatrix;

struct Instance {
    net: Network,
    spec: ModelSpec,
    coef: CoefficientSet,
    vts: SeriesMatrix,
}

fn instance(seed: u64, n_max: usize, t: usize) -> Instance {
    let mut rng = RngStream::new(seed);
    let n = 2 + below(&mut rng, n_max - 1);
    let n_cov = 1 + below(&mut rng, 2);
    let directed = rng.next_uniform() < 0.5;
    let net = random_network(&mut rng, n, directed, n_cov, 0.5, false);
    let spec = random_spec(&mut rng, n, n_cov, 2, 2);
    let coef = random_coef(&mut rng, &spec, n, 0.9);
    let vts = gnar_simulate(&net, &spec, &coef, &SimConfig::new(t), &mut rng).unwrap().series;
    Instance { net, spec, coef, vts }
}

fn to_dmatrix(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

#[test]
fn residuals_are_orthogonal_to_design() {
    for seed in 0..30 {
        let inst = instance(seed, 6, 80);
        let d = build_design(&inst.vts, &inst.net, &inst.spec).unwrap();
        let f = fit(&inst.vts, &inst.net, &inst.spec).unwrap();
        let x = to_dmatrix(&d.x);
        let y = DMatrix::from_column_slice(d.y.len(), 1, &d.y);
        let g = DMatrix::from_column_slice(f.gamma.len(), 1, &f.gamma);
        let normal = x.transpose() * (&y - &x * g);
        let scale = x.norm() * y.norm();
        assert!(normal.amax() <= 1e-8 * scale, "seed {seed}: {}", normal.amax());
    }
}

#[test]
fn fitted_plus_residual_is_observed() {
    let inst = instance(5, 6, 100);
    let f = fit(&inst.vts, &inst.net, &inst.spec).unwrap();
    for t in 0..inst.vts.n_times() {
        for i in 0..inst.vts.n_nodes() {
            match (f.fitted.get(t, i), f.residuals.get(t, i)) {
                (Some(a), Some(b)) => assert!((a + b - inst.vts.get(t, i).unwrap()).abs() < 1e-12),
                (None, None) => assert!(t < inst.spec.p()),
                _ => panic!("fitted and residual disagree at ({t}, {i})"),
            }
        }
    }
}

#[test]
fn gls_with_identity_equals_ols() {
    for seed in 0..25 {
        let inst = instance(seed + 100, 5, 60);
        let n = inst.net.n_nodes();
        let f = fit(&inst.vts, &inst.net, &inst.spec).unwrap();
        if f.rank < f.n_params() {
            continue;
        }
        let gls = gls_restricted_estimate(&inst.vts, &inst.net, &inst.spec, &Matrix::identity(n)).unwrap();
        for (a, b) in gls.iter().zip(&f.gamma) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "seed {seed}: {a} vs {b}");
        }
        let scaled = gls_restricted_estimate(&inst.vts, &inst.net, &inst.spec, &Matrix::identity(n).scale(3.7)).unwrap();
        for (a, b) in gls.iter().zip(&scaled) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}

#[test]
fn per_node_ar1_gls_matches_separate_regressions() {
    let inst = instance(7, 5, 70);
    let n = inst.net.n_nodes();
    let spec = ModelSpec::new(1, vec![0], inst.net.n_covariates(), gnar_core::AlphaMode::PerNode).unwrap();
    let gls = gls_restricted_estimate(&inst.vts, &inst.net, &spec, &Matrix::identity(n)).unwrap();
    for (i, g) in gls.iter().enumerate() {
        let x: Vec<f64> = inst.vts.column(i).into_iter().flatten().collect();
        let num: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
        let den: f64 = x[..x.len() - 1].iter().map(|v| v * v).sum();
        assert!((g - num / den).abs() < 1e-10);
    }
}

#[test]
fn design_reproduces_var_form() {
    for seed in 0..20 {
        let inst = instance(seed + 200, 6, 30);
        let d = build_design(&inst.vts, &inst.net, &inst.spec).unwrap();
        let gamma = inst.coef.to_gamma(&inst.spec, inst.net.n_nodes()).unwrap();
        let xg = d.x.mul_vec(&gamma).unwrap();
        let phis = to_var_matrices(&inst.net, &inst.spec, &inst.coef).unwrap();
        let m = inst.vts.to_matrix().unwrap();
        for (&(t, i), v) in d.row_index.iter().zip(&xg) {
            let mut expect = 0.0;
            let mut size = 0.0;
            for (k, phi) in phis.iter().enumerate() {
                for q in 0..m.cols() {
                    expect += phi[(i, q)] * m[(t - k - 1, q)];
                    size += (phi[(i, q)] * m[(t - k - 1, q)]).abs();
                }
            }
            assert!((v - expect).abs() <= 1e-14 * size.max(1.0), "seed {seed}: {v} vs {expect}");
        }
    }
}

#[test]
fn innovation_covariance_matches_direct_product() {
    let inst = instance(11, 4, 90);
    let f = fit(&inst.vts, &inst.net, &inst.spec).unwrap();
    let (t_all, n, p) = (inst.vts.n_times(), inst.vts.n_nodes(), inst.spec.p());
    let u = DMatrix::from_fn(t_all - p, n, |r, i| f.residuals.get(r + p, i).unwrap());
    let direct = u.transpose() * &u / (t_all - p) as f64;
    let ours = to_dmatrix(&f.sigma_u_hat);
    assert!((&direct - &ours).amax() < 1e-14);
    assert!(ours.symmetric_eigenvalues().iter().all(|&e| e > -1e-12));
    let log_det = direct.determinant().ln();
    assert!((f.log_det - log_det).abs() < 1e-10);
    let m = f.n_params() as f64;
    let te = (t_all - p) as f64;
    assert!((f.aic - f.bic - (2.0 - te.ln()) * m / te).abs() < 1e-12);
}

#[test]
fn missing_block_keeps_neighbour_rows() {
    let net = five_net();
    let spec = ModelSpec::per_node(1, vec![1]).unwrap();
    let coef = CoefficientSet::per_node(
        vec![vec![0.4], vec![0.0], vec![-0.6], vec![0.0], vec![0.0]],
        vec![vec![0.3]],
        vec![1.0; 5],
    );
    let mut vts = gnar_simulate(&net, &spec, &coef, &SimConfig::new(200), &mut RngStream::new(3)).unwrap().series;
    for t in 49..150 {
        vts.set(t, 2, None);
    }
    let f = fit(&vts, &net, &spec).unwrap();
    assert!((49..150).all(|t| f.fitted.get(t, 3).is_some()));
    assert!((49..151).all(|t| f.fitted.get(t, 2).is_none()));
    assert_eq!(f.dropped_row_count, 102);
}

#[test]
fn relabelling_nodes_permutes_the_design() {
    let inst = instance(31, 6, 40);
    let n = inst.net.n_nodes();
    let spec = ModelSpec::new(2, vec![2, 1], inst.net.n_covariates(), gnar_core::AlphaMode::Global).unwrap();
    let perm: Vec<usize> = (0..n).rev().collect();
    let edges = inst
        .net
        .edges()
        .iter()
        .map(|e| Edge::new(perm[e.from], perm[e.to], e.dist, e.cov))
        .collect();
    let net2 = Network::with_default_names(n, inst.net.is_directed(), inst.net.n_covariates(), edges).unwrap();
    let rows = (0..inst.vts.n_times())
        .map(|t| (0..n).map(|j| inst.vts.get(t, perm[j])).collect())
        .collect();
    let vts2 = SeriesMatrix::new(gnar_core::network::default_names(n), rows).unwrap();
    let a = build_design(&inst.vts, &inst.net, &spec).unwrap();
    let b = build_design(&vts2, &net2, &spec).unwrap();
    for (k, &(t, i)) in a.row_index.iter().enumerate() {
        let k2 = b.row_index.iter().position(|&r| r == (t, perm[i])).unwrap();
        for c in 0..a.x.cols() {
            assert!((a.x[(k, c)] - b.x[(k2, c)]).abs() < 1e-13);
        }
    }
}

#[test]
fn larger_samples_estimate_better() {
    let net = five_net();
    let spec = ModelSpec::global(2, vec![2, 0]).unwrap();
    let coef = CoefficientSet::global(vec![0.2, 0.3], vec![vec![0.2, 0.3], vec![]], vec![1.0; 5]);
    let truth = coef.to_gamma(&spec, 5).unwrap();
    let err = |n: usize, seed: u64| {
        let vts = gnar_simulate(&net, &spec, &coef, &SimConfig::new(n), &mut RngStream::new(seed)).unwrap().series;
        let g = fit(&vts, &net, &spec).unwrap().gamma;
        g.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let wins = (0..100u64).filter(|&s| err(5000, 2 * s) < err(200, 2 * s + 1)).count();
    assert!(wins >= 90, "{wins}/100");
}

#[test]
fn bic_prefers_true_order_over_ar1() {
    let net = five_net();
    let truth = ModelSpec::global(2, vec![2, 0]).unwrap();
    let small = ModelSpec::global(1, vec![0]).unwrap();
    let coef = CoefficientSet::global(vec![0.2, 0.3], vec![vec![0.2, 0.3], vec![]], vec![1.0; 5]);
    let wins = (0..100u64)
        .filter(|&s| {
            let vts = gnar_simulate(&net, &truth, &coef, &SimConfig::new(2000), &mut RngStream::new(s)).unwrap().series;
            fit(&vts, &net, &truth).unwrap().bic < fit(&vts, &net, &small).unwrap().bic
        })
        .count();
    assert!(wins >= 95, "{wins}/100");
}

#[test]
fn white_noise_selects_order_zero() {
    let hits = (0..100u64)
        .filter(|&s| {
            let mut rng = RngStream::new(s);
            let vts = SeriesMatrix::from_rows((0..200).map(|_| vec![rng.next_normal()]).collect()).unwrap();
            ar_baseline(&vts, 5, Criterion::Bic).unwrap()[0].order == 0
        })
        .count();
    assert!(hits >= 80, "{hits}/100");
}

#[test]
fn ar_baseline_strips_leading_missing() {
    let mut rows: Vec<Vec<Option<f64>>> = vec![vec![None]; 3];
    let mut x = vec![1.0, 0.5];
    for t in 2..50 {
        x.push(1.6 * x[t - 1] - 0.9 * x[t - 2]);
    }
    rows.extend(x.iter().map(|v| vec![Some(*v)]));
    let vts = SeriesMatrix::new(vec!["a".into()], rows).unwrap();
    let fits = ar_baseline(&vts, 2, Criterion::Bic).unwrap();
    assert_eq!((fits[0].offset, fits[0].order), (3, 2));
    assert!((fits[0].coef[0] - 1.6).abs() < 1e-10 && (fits[0].coef[1] + 0.9).abs() < 1e-10);
    let short = SeriesMatrix::new(vec!["a".into()], vec![vec![None], vec![Some(1.0)], vec![Some(2.0)]]).unwrap();
    assert!(ar_baseline(&short, 2, Criterion::Bic).is_err());
}
