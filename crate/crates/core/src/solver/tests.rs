use super::*;
use crate::data::{expand_overlaps, standardize, GenotypeMatrix, Phenotype, PathwayMap};
use crate::testutil::random_data;
use ndarray::Array2;
use proptest::prelude::*;

/// Accelerated proximal gradient oracle over several groups, using the exact
/// prox of `s|.|_1 + g|.|_2` per group.
fn prox_gradient_groups(
    data: &StandardizedData,
    groups: &[Vec<usize>],
    target: &[f64],
    pens: &[BlockPenalty],
    start: Vec<Vec<f64>>,
) -> Vec<Vec<f64>> {
    let width: usize = groups.iter().map(Vec::len).sum();
    let step = 1.0 / width as f64;
    let mut b = start;
    let mut momentum = b.clone();
    let mut t = 1.0_f64;
    for _ in 0..400_000 {
        let mut r = target.to_vec();
        for (cols, v) in groups.iter().zip(&momentum) {
            for (&j, &bj) in cols.iter().zip(v) {
                axpy(-bj, data.column(j), &mut r);
            }
        }
        let mut moved: f64 = 0.0;
        let mut next = Vec::with_capacity(groups.len());
        for ((cols, v), pen) in groups.iter().zip(&momentum).zip(pens) {
            let z: Vec<f64> = cols
                .iter()
                .zip(v)
                .map(|(&j, &vj)| {
                    let u = vj + step * dot(data.column(j), &r);
                    let a = u.abs() - step * pen.l1;
                    if a > 0.0 {
                        a * u.signum()
                    } else {
                        0.0
                    }
                })
                .collect();
            let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let shrink = if nz > step * pen.group {
                1.0 - step * pen.group / nz
            } else {
                0.0
            };
            next.push(z.iter().map(|v| v * shrink).collect::<Vec<f64>>());
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        momentum = next
            .iter()
            .zip(&b)
            .map(|(n, o)| {
                n.iter()
                    .zip(o)
                    .map(|(nv, ov)| nv + (t - 1.0) / t_next * (nv - ov))
                    .collect()
            })
            .collect();
        for (n, o) in next.iter().zip(&b) {
            for (nv, ov) in n.iter().zip(o) {
                moved = moved.max((nv - ov).abs());
            }
        }
        b = next;
        t = t_next;
        if moved < 1e-14 {
            break;
        }
    }
    b
}

fn prox_gradient_block(
    data: &StandardizedData,
    cols: &[usize],
    target: &[f64],
    pen: BlockPenalty,
    start: Vec<f64>,
) -> Vec<f64> {
    prox_gradient_groups(data, &[cols.to_vec()], target, &[pen], vec![start])
        .pop()
        .unwrap()
}

/// Dense grid search followed by proximal-gradient polishing.
fn grid_oracle(
    data: &StandardizedData,
    cols: &[usize],
    target: &[f64],
    pen: BlockPenalty,
) -> (Vec<f64>, f64) {
    let p = cols.len();
    let bound = 2.0 * target.iter().map(|v| v * v).sum::<f64>().sqrt();
    let steps = 24usize;
    let mut best = vec![0.0; p];
    let mut best_f = block_objective(data, cols, target, &best, pen);
    let total = (steps + 1).pow(p as u32);
    let mut b = vec![0.0; p];
    for code in 0..total {
        let mut c = code;
        for v in b.iter_mut() {
            *v = -bound + 2.0 * bound * (c % (steps + 1)) as f64 / steps as f64;
            c /= steps + 1;
        }
        let f = block_objective(data, cols, target, &b, pen);
        if f < best_f {
            best_f = f;
            best = b.clone();
        }
    }
    let polished = prox_gradient_block(data, cols, target, pen, best);
    let f = block_objective(data, cols, target, &polished, pen);
    (polished, f)
}

fn all_cols(data: &StandardizedData) -> Vec<usize> {
    (0..data.n_features()).filter(|&j| data.is_retained(j)).collect()
}

#[test]
fn selection_stat_examples() {
    // X'r = (3, -0.5) after soft threshold at 1 is (2, 0)
    let s: f64 = [3.0, -0.5]
        .iter()
        .map(|&z| soft_threshold(z, 1.0).powi(2))
        .sum::<f64>()
        .sqrt();
    assert_eq!(s, 2.0);

    let data = random_data(12, 4, 3, &[(0, 1.0)]);
    let cols = all_cols(&data);
    let zero = vec![0.0; 12];
    assert_eq!(pathway_selection_stat(&data, &cols, &zero, 0.5, 0.3), 0.0);
}

#[test]
fn selection_stat_matches_direct_formula() {
    let data = random_data(5, 3, 11, &[(1, 0.7)]);
    let cols = all_cols(&data);
    let x = data.x();
    let r = data.y();
    let (alpha, lambda) = (0.4, 0.05);
    let mut acc = 0.0;
    for &j in &cols {
        let mut z = 0.0;
        for i in 0..5 {
            z += x[[i, j]] * r[i];
        }
        let t = alpha * lambda;
        let st = if z.abs() > t { z.signum() * (z.abs() - t) } else { 0.0 };
        acc += st * st;
    }
    let got = pathway_selection_stat(&data, &cols, r, alpha, lambda);
    assert!((got - acc.sqrt()).abs() < 1e-12);
}

#[test]
fn cgd_pathway_matches_grid_oracle_on_small_instances() {
    let cases = [
        (1u64, 0.5, 0.3),
        (2, 0.2, 0.2),
        (3, 0.8, 0.4),
        (4, 0.05, 0.1),
        (5, 0.95, 0.5),
        (6, 0.5, 0.05),
    ];
    for &(seed, alpha, frac) in &cases {
        let p = 2 + (seed as usize % 3);
        let data = random_data(8, p, seed, &[(0, 1.5), (1, -1.0)]);
        let cols = all_cols(&data);
        let lam_scale = data.xt_dot(data.y()).iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let lambda = frac * lam_scale;
        let pen = BlockPenalty::new(alpha, lambda, 1.0);
        let beta = fit_pathway_cgd(&data, &cols, alpha, lambda, 1.0, 1e-10, 100_000).unwrap();
        let f = block_objective(&data, &cols, data.y(), &beta, pen);
        let (_, f_oracle) = grid_oracle(&data, &cols, data.y(), pen);
        assert!(
            f <= f_oracle + 1e-6,
            "seed {seed}: solver {f} vs oracle {f_oracle}"
        );
    }
}

#[test]
fn gate_closed_gives_zero() {
    let data = random_data(20, 5, 9, &[(2, 1.0)]);
    let cols = all_cols(&data);
    let alpha = 0.5;
    // any lambda with stat <= group penalty keeps the block at zero
    let mut lambda = 1.0;
    while pathway_selection_stat(&data, &cols, data.y(), alpha, lambda) > (1.0 - alpha) * lambda {
        lambda *= 1.5;
    }
    let beta = fit_pathway_cgd(&data, &cols, alpha, lambda, 1.0, 1e-6, 10_000).unwrap();
    assert!(beta.iter().all(|&b| b == 0.0));
}

#[test]
fn alpha_one_reverts_to_lasso() {
    let data = random_data(40, 8, 21, &[(0, 1.0), (3, -0.8), (5, 0.5)]);
    let cols = all_cols(&data);
    let lambda = 0.3 * lasso_lambda_max(&data);
    let sgl = fit_pathway_cgd(&data, &cols, 1.0, lambda, 1.0, 1e-10, 100_000).unwrap();
    let lasso = fit_lasso(&data, lambda).unwrap();
    for (&j, b) in cols.iter().zip(&sgl) {
        assert!((b - lasso.beta[j]).abs() < 1e-6, "feature {j}");
    }
}

fn disjoint_map(p: usize, size: usize) -> PathwayMap {
    let sets = (0..p / size)
        .map(|l| (l * size..(l + 1) * size).collect())
        .collect();
    PathwayMap::from_feature_sets(sets, p, 5).unwrap()
}

#[test]
fn empty_model_above_gate() {
    let data = random_data(30, 12, 4, &[(0, 1.0)]);
    let map = disjoint_map(12, 4);
    let config = SglConfig::new(1e6, 0.5, 3);
    let fit = fit_sgl_cgd(&data, &map, &config).unwrap();
    assert!(fit.selected_pathways.is_empty() && fit.selected_features.is_empty());
    let expanded = expand_overlaps(&map);
    let fit = fit_sgl_bcgd(&data, &map, &expanded, &config).unwrap();
    assert!(fit.selected_pathways.is_empty() && fit.selected_features.is_empty());
    let yy = dot(data.y(), data.y());
    assert!((fit.objective - 0.5 * yy).abs() < 1e-12);
}

#[test]
fn duplicated_pathways_fit_identically() {
    let data = random_data(30, 10, 5, &[(1, 1.0), (2, 1.0)]);
    let sets = vec![(0..5).collect(), (0..5).collect(), (5..10).collect()];
    let map = PathwayMap::from_feature_sets(sets, 10, 5).unwrap();
    let lambda = 0.3 * lasso_lambda_max(&data);
    let fit = fit_sgl_cgd(&data, &map, &SglConfig::new(lambda, 0.6, 3)).unwrap();
    assert_eq!(fit.coefficients[0], fit.coefficients[1]);
    assert_eq!(fit.is_selected(0), fit.is_selected(1));
}

#[test]
fn cgd_is_order_independent() {
    let data = random_data(40, 20, 8, &[(1, 1.0), (7, 0.8), (13, -0.6)]);
    let sets: Vec<Vec<usize>> = (0..4).map(|l| (l * 5..l * 5 + 5).collect()).collect();
    let mut reversed = sets.clone();
    reversed.reverse();
    let a = PathwayMap::from_feature_sets(sets, 20, 5).unwrap();
    let b = PathwayMap::from_feature_sets(reversed, 20, 5).unwrap();
    let lambda = 0.2 * lasso_lambda_max(&data);
    let fa = fit_sgl_cgd(&data, &a, &SglConfig::new(lambda, 0.7, 4)).unwrap();
    let fb = fit_sgl_cgd(&data, &b, &SglConfig::new(lambda, 0.7, 4)).unwrap();
    for l in 0..4 {
        assert_eq!(fa.coefficients[l], fb.coefficients[3 - l]);
    }
}

#[test]
fn bcgd_matches_cgd_with_single_causal_disjoint_pathway() {
    let data = random_data(200, 20, 12, &[(2, 1.0), (3, 1.0)]);
    let map = disjoint_map(20, 5);
    let expanded = expand_overlaps(&map);
    let alpha = 0.8;
    let mut lambda = lasso_lambda_max(&data);
    let cgd = loop {
        let fit = fit_sgl_cgd(&data, &map, &SglConfig::new(lambda, alpha, 4)).unwrap();
        if !fit.selected_pathways.is_empty() {
            break fit;
        }
        lambda *= 0.97;
    };
    assert_eq!(cgd.selected_pathways, vec![0]);
    let bcgd = fit_sgl_bcgd(&data, &map, &expanded, &SglConfig::new(lambda, alpha, 4)).unwrap();
    assert_eq!(bcgd.selected_pathways, cgd.selected_pathways);
    assert_eq!(bcgd.selected_features, cgd.selected_features);
    for ((ja, a), (jb, b)) in bcgd.coefficients[0].iter().zip(&cgd.coefficients[0]) {
        assert_eq!(ja, jb);
        assert!((a - b).abs() < 1e-5);
    }
}

#[test]
fn alpha_zero_selected_pathways_are_dense() {
    let data = random_data(60, 12, 14, &[(0, 1.0), (5, 0.6)]);
    let map = disjoint_map(12, 4);
    let expanded = expand_overlaps(&map);
    let lambda = 0.3 * lasso_lambda_max(&data);
    let fit = fit_sgl_bcgd(&data, &map, &expanded, &SglConfig::new(lambda, 0.0, 3)).unwrap();
    assert!(!fit.selected_pathways.is_empty());
    for &l in &fit.selected_pathways {
        let size = map.pathway(l).members.iter().filter(|&&j| data.is_retained(j)).count();
        assert_eq!(fit.coefficients[l].len(), size);
    }
}

#[test]
fn bcgd_with_overlaps_reaches_global_optimum() {
    let data = random_data(80, 15, 17, &[(4, 1.0), (5, 0.7), (11, -0.5)]);
    let sets: Vec<Vec<usize>> = vec![(0..7).collect(), (4..11).collect(), (9..15).collect()];
    let map = PathwayMap::from_feature_sets(sets.clone(), 15, 5).unwrap();
    let expanded = expand_overlaps(&map);
    let mut config = SglConfig::new(0.15 * lasso_lambda_max(&data), 0.7, 3);
    config.tol = 1e-10;
    config.outer_tol = 1e-9;
    config.max_outer_iters = 100_000;
    let fit = fit_sgl_bcgd(&data, &map, &expanded, &config).unwrap();
    assert!(fit.converged());
    let pens: Vec<BlockPenalty> = (0..3).map(|l| config.penalty(l)).collect();
    let start = sets.iter().map(|c| vec![0.0; c.len()]).collect();
    let oracle = prox_gradient_groups(&data, &sets, data.y(), &pens, start);
    let oracle_fit = SglFit::assemble(
        Algorithm::Bcgd,
        &config,
        sets.iter()
            .zip(&oracle)
            .map(|(c, b)| c.iter().copied().zip(b.iter().copied()).collect())
            .collect(),
    );
    let fo = objective(&data, &map, &oracle_fit, &config);
    assert!(fit.objective <= fo + 1e-7, "{} vs {fo}", fit.objective);
}

#[test]
fn objective_matches_arithmetic() {
    let data = random_data(10, 6, 2, &[(0, 1.0)]);
    let sets = vec![vec![0, 1, 2], vec![2, 3, 4, 5]];
    let map = PathwayMap::from_feature_sets(sets, 6, 5).unwrap();
    let config = SglConfig::new(0.4, 0.3, 2).with_weights(vec![1.0, 2.0]);
    let mut fit = SglFit::assemble(
        Algorithm::Bcgd,
        &config,
        vec![vec![(0, 0.5), (2, -0.25)], vec![(2, 0.1), (5, 0.2)]],
    );
    let x = data.x();
    let y = data.y();
    let mut rss = 0.0;
    for i in 0..10 {
        let fitted = 0.5 * x[[i, 0]] - 0.25 * x[[i, 2]] + 0.1 * x[[i, 2]] + 0.2 * x[[i, 5]];
        rss += (y[i] - fitted).powi(2);
    }
    let expected = 0.5 * rss
        + 0.7 * 0.4 * (1.0 * (0.25f64 + 0.0625).sqrt() + 2.0 * (0.01f64 + 0.04).sqrt())
        + 0.3 * 0.4 * (0.5 + 0.25 + 0.1 + 0.2);
    assert!((objective(&data, &map, &fit, &config) - expected).abs() < 1e-12);

    fit.coefficients = vec![vec![], vec![]];
    let yy = dot(y, y);
    assert!((objective(&data, &map, &fit, &config) - 0.5 * yy).abs() < 1e-12);
    fit.algorithm = Algorithm::Cgd;
    assert!((objective(&data, &map, &fit, &config) - yy).abs() < 1e-12);
}

#[test]
fn lasso_zero_above_lambda_max_and_orthonormal_closed_form() {
    let data = random_data(25, 7, 31, &[(0, 1.0)]);
    let fit = fit_lasso(&data, lasso_lambda_max(&data) * 1.0001).unwrap();
    assert_eq!(fit.cardinality(), 0);

    // centred columns (-1,-1,1,1), (-1,1,-1,1), (-1,1,1,-1) are orthogonal
    let values = Array2::from_shape_vec(
        (4, 3),
        vec![0, 0, 0, 0, 2, 2, 2, 0, 2, 2, 2, 0],
    )
    .unwrap();
    let samples: Vec<String> = (0..4).map(|i| format!("s{i}")).collect();
    let snps: Vec<String> = (0..3).map(|j| format!("rs{j}")).collect();
    let g = GenotypeMatrix::new(samples.clone(), snps, values).unwrap();
    let ph = Phenotype::new(samples, vec![1.0, 3.0, -2.0, 0.5]).unwrap();
    let data = standardize(&g, &ph).unwrap();
    let c = data.xt_dot(data.y());
    let fit = fit_lasso(&data, 0.4).unwrap();
    for j in 0..3 {
        assert!((fit.beta[j] - soft_threshold(c[j], 0.4)).abs() < 1e-12);
    }
}

#[test]
fn lasso_matches_convex_oracle() {
    for seed in 0..5u64 {
        let data = random_data(10, 6, 100 + seed, &[(0, 1.0), (2, -1.0)]);
        let cols = all_cols(&data);
        let lambda = 0.25 * lasso_lambda_max(&data);
        let fit = fit_lasso(&data, lambda).unwrap();
        assert!(fit.kkt_violation < 1e-6);
        let pen = BlockPenalty { l1: lambda, group: 0.0 };
        let sub: Vec<f64> = cols.iter().map(|&j| fit.beta[j]).collect();
        let f = block_objective(&data, &cols, data.y(), &sub, pen);
        let oracle = prox_gradient_block(&data, &cols, data.y(), pen, vec![0.0; cols.len()]);
        let fo = block_objective(&data, &cols, data.y(), &oracle, pen);
        assert!(f <= fo + 1e-8, "seed {seed}: {f} vs {fo}");
    }
}

#[test]
fn config_validation() {
    assert!(SglConfig::new(1.0, 1.5, 2).validate(2).is_err());
    assert!(SglConfig::new(-1.0, 0.5, 2).validate(2).is_err());
    assert!(SglConfig::new(1.0, 0.5, 2).validate(3).is_err());
    let c = SglConfig::new(1.0, 0.5, 2).with_weights(vec![1.0, 0.0]);
    assert!(c.validate(2).is_err());
    assert!(SglConfig::new(0.0, 0.0, 1).validate(1).is_ok());
}

#[test]
fn nonconvergence_carries_last_iterate() {
    let data = random_data(30, 6, 41, &[(0, 1.0), (1, 1.0)]);
    let cols = all_cols(&data);
    let lambda = 0.05 * lasso_lambda_max(&data);
    match fit_pathway_cgd(&data, &cols, 0.5, lambda, 1.0, 1e-15, 1) {
        Err(Error::NonConvergence { iterations, last, .. }) => {
            assert_eq!(iterations, 1);
            assert_eq!(last.len(), cols.len());
        }
        other => panic!("expected NonConvergence, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cgd_gate_and_zero_coordinate_conditions(
        seed in 0u64..10_000,
        alpha in 0.05f64..0.95,
        frac in 0.05f64..0.9,
    ) {
        let data = random_data(30, 12, seed, &[(0, 1.0), (6, -0.8)]);
        let map = disjoint_map(12, 4);
        let lambda = frac * lasso_lambda_max(&data);
        let mut config = SglConfig::new(lambda, alpha, 3);
        config.tol = 1e-9;
        let fit = fit_sgl_cgd(&data, &map, &config).unwrap();
        prop_assert!(fit.converged());
        for l in 0..3 {
            let cols = pathway_columns(&data, &map, l);
            let stat = pathway_selection_stat(&data, &cols, data.y(), alpha, lambda);
            let pen = config.penalty(l);
            if !fit.is_selected(l) {
                prop_assert!(stat <= pen.group + 1e-8);
                continue;
            }
            prop_assert!(stat > pen.group);
            let mut r = data.y().to_vec();
            for &(j, b) in &fit.coefficients[l] {
                axpy(-b, data.column(j), &mut r);
            }
            // zero coordinates: -alpha lambda <= x_j' r <= alpha lambda (up to tolerance)
            for &j in &cols {
                if fit.coefficients[l].iter().all(|&(k, _)| k != j) {
                    let g = dot(data.column(j), &r);
                    prop_assert!(g.abs() <= pen.l1 + 1e-6, "g = {g}, l1 = {}", pen.l1);
                }
            }
        }
    }

    #[test]
    fn block_objective_never_increases_across_sweeps(
        seed in 0u64..10_000,
        alpha in 0.0f64..1.0,
        frac in 0.02f64..0.6,
    ) {
        let data = random_data(20, 5, seed, &[(1, 1.0)]);
        let cols = all_cols(&data);
        let lambda = frac * lasso_lambda_max(&data);
        let pen = BlockPenalty::new(alpha, lambda, 1.0);
        let mut beta = vec![0.0; cols.len()];
        let mut f = block_objective(&data, &cols, data.y(), &beta, pen);
        for _ in 0..30 {
            let out = solve_block(&data, &cols, data.y(), beta, pen, 0.0, 1);
            let nf = block_objective(&data, &cols, data.y(), &out.beta, pen);
            prop_assert!(nf <= f + 1e-12, "{nf} > {f}");
            f = nf;
            beta = out.beta;
        }
    }
}
