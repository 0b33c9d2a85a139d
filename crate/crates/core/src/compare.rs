//! Comparison of two ranked lists by the top-k Canberra distance.
//!
//! Lists may be partial: the universe is the union of both lists and a
//! variable missing from one list takes the fill rank `p* = |union|` there.
//! Raw distances are normalised by their Monte Carlo expectation under
//! independent uniform rankings, and significance is assessed by permuting
//! the ranks of the second list among its ranked variables.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;

pub const DEFAULT_EXPECTATION_DRAWS: usize = 1000;
pub const DEFAULT_PERMUTATIONS: usize = 1000;

const EXPECTATION_TAG: &str = "canberra-expectation";
const PERMUTATION_TAG: &str = "canberra-permutation";

/// Ranks of every variable of a shared universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankArray {
    ids: Vec<String>,
    /// Proper rank, or the fill rank for unranked variables.
    ranks: Vec<usize>,
    ranked: Vec<bool>,
    n_ranked: usize,
    fill: usize,
}

impl RankArray {
    /// `ranks[i]` is the rank of `ids[i]`, `None` when unranked. Ranked
    /// variables must hold the ranks `1..=m` exactly once; unranked ones get
    /// the fill rank `fill`, which must be at least the universe size.
    pub fn new(ids: Vec<String>, ranks: Vec<Option<usize>>, fill: usize) -> Result<Self> {
        if ids.len() != ranks.len() {
            return Err(Error::InvalidRanks("ids and ranks differ in length".into()));
        }
        if fill < ids.len() {
            return Err(Error::InvalidRanks(format!(
                "fill rank {fill} is below the universe size {}",
                ids.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let n_ranked = ranks.iter().flatten().count();
        let mut hit = vec![false; n_ranked];
        for &r in ranks.iter().flatten() {
            if r == 0 || r > n_ranked || hit[r - 1] {
                return Err(Error::InvalidRanks(format!(
                    "ranks of ranked variables must be a permutation of 1..={n_ranked}"
                )));
            }
            hit[r - 1] = true;
        }
        Ok(Self {
            ids,
            ranked: ranks.iter().map(Option::is_some).collect(),
            ranks: ranks.iter().map(|r| r.unwrap_or(fill)).collect(),
            n_ranked,
            fill,
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Ranks with the fill rank substituted for unranked variables.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Number of variables that carry a proper rank.
    pub fn n_ranked(&self) -> usize {
        self.n_ranked
    }

    pub fn fill_rank(&self) -> usize {
        self.fill
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_ranked(&self, i: usize) -> bool {
        self.ranked[i]
    }
}

fn check_universe(tau: &RankArray, sigma: &RankArray) -> Result<()> {
    if tau.ids != sigma.ids {
        return Err(Error::UniverseMismatch(tau.len(), sigma.len()));
    }
    Ok(())
}

/// Rank arrays over the union of two ranked ID lists (best first).
///
/// The universe is list A followed by the members of B not in A. Returns the
/// arrays and the fill rank `p*`.
pub fn build_rank_arrays(a: &[String], b: &[String]) -> Result<(RankArray, RankArray, usize)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidRanks("ranked lists must be nonempty".into()));
    }
    let mut universe: Vec<String> = Vec::with_capacity(a.len() + b.len());
    let mut pos: HashMap<&str, usize> = HashMap::with_capacity(a.len() + b.len());
    for id in a {
        if pos.insert(id.as_str(), universe.len()).is_some() {
            return Err(Error::DuplicateId(id.clone()));
        }
        universe.push(id.clone());
    }
    let mut in_b = HashSet::with_capacity(b.len());
    for id in b {
        if !in_b.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
        if !pos.contains_key(id.as_str()) {
            pos.insert(id.as_str(), universe.len());
            universe.push(id.clone());
        }
    }
    let fill = universe.len();
    let mut tau = vec![None; fill];
    let mut sigma = vec![None; fill];
    for (r, id) in a.iter().enumerate() {
        tau[pos[id.as_str()]] = Some(r + 1);
    }
    for (r, id) in b.iter().enumerate() {
        sigma[pos[id.as_str()]] = Some(r + 1);
    }
    Ok((
        RankArray::new(universe.clone(), tau, fill)?,
        RankArray::new(universe, sigma, fill)?,
        fill,
    ))
}

/// Top-k Canberra distance between two rank vectors.
pub fn canberra_ranks(tau: &[usize], sigma: &[usize], k: usize) -> f64 {
    let cap = k + 1;
    tau.iter()
        .zip(sigma)
        .map(|(&t, &s)| {
            let (t, s) = (t.min(cap), s.min(cap));
            if t == s {
                0.0
            } else {
                (t as f64 - s as f64).abs() / (t + s) as f64
            }
        })
        .sum()
}

pub fn canberra_topk(tau: &RankArray, sigma: &RankArray, k: usize) -> Result<f64> {
    check_universe(tau, sigma)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok(canberra_ranks(&tau.ranks, &sigma.ranks, k))
}

/// Monte Carlo estimates of `E[Ca(k, p)]` for every `k` in `ks`, from `draws`
/// pairs of independent uniform permutations of `1..=p` shared across `k`.
pub fn expected_canberra_curve(ks: &[usize], p: usize, draws: usize, seed: u64) -> Result<Vec<f64>> {
    if draws == 0 {
        return Err(Error::InvalidParameter("at least one draw is required".into()));
    }
    if p == 0 {
        return Ok(vec![0.0; ks.len()]);
    }
    let sums = (0..draws as u64)
        .into_par_iter()
        .map(|m| {
            let mut rng = substream(seed, EXPECTATION_TAG, m);
            let mut tau: Vec<usize> = (1..=p).collect();
            let mut sigma = tau.clone();
            tau.shuffle(&mut rng);
            sigma.shuffle(&mut rng);
            ks.iter()
                .map(|&k| canberra_ranks(&tau, &sigma, k))
                .collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>();
    let mut total = vec![0.0; ks.len()];
    for s in &sums {
        for (t, v) in total.iter_mut().zip(s) {
            *t += v;
        }
    }
    Ok(total.into_iter().map(|t| t / draws as f64).collect())
}

pub fn expected_canberra(k: usize, p: usize, draws: usize, seed: u64) -> Result<f64> {
    Ok(expected_canberra_curve(&[k], p, draws, seed)?[0])
}

/// `Ca / E[Ca]`; zero when both vanish.
pub fn normalized_canberra(
    tau: &RankArray,
    sigma: &RankArray,
    k: usize,
    expected: f64,
) -> Result<f64> {
    let ca = canberra_topk(tau, sigma, k)?;
    normalize(ca, expected)
}

fn normalize(ca: f64, expected: f64) -> Result<f64> {
    if expected > 0.0 {
        Ok(ca / expected)
    } else if ca == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::ZeroExpectation(ca))
    }
}

/// Permutation p-values for each `k` in `ks`.
///
/// Each of the `permutations` draws shuffles the ranks of `sigma` among its
/// ranked variables (unranked variables keep the fill rank); the same draws
/// serve every `k`. `p*(k)` is the fraction of draws whose distance to `tau`
/// is at least the observed one.
pub fn permutation_pvalues(
    tau: &RankArray,
    sigma: &RankArray,
    ks: &[usize],
    permutations: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_universe(tau, sigma)?;
    if permutations == 0 {
        return Err(Error::InvalidParameter("at least one permutation is required".into()));
    }
    let observed: Vec<f64> = ks.iter().map(|&k| canberra_ranks(&tau.ranks, &sigma.ranks, k)).collect();
    let ranked_pos: Vec<usize> = (0..sigma.len()).filter(|&i| sigma.is_ranked(i)).collect();
    let hits = (0..permutations as u64)
        .into_par_iter()
        .map(|z| {
            let mut rng = substream(seed, PERMUTATION_TAG, z);
            let mut ranks: Vec<usize> = ranked_pos.iter().map(|&i| sigma.ranks[i]).collect();
            ranks.shuffle(&mut rng);
            let mut permuted = sigma.ranks.clone();
            for (&i, &r) in ranked_pos.iter().zip(&ranks) {
                permuted[i] = r;
            }
            ks.iter()
                .zip(&observed)
                .map(|(&k, &obs)| {
                    let ca = canberra_ranks(&tau.ranks, &permuted, k);
                    // equal distances summed in a different order may differ in the last bits
                    usize::from(obs <= ca + 1e-12 * ca.max(1.0))
                })
                .collect::<Vec<usize>>()
        })
        .collect::<Vec<_>>();
    let mut counts = vec![0usize; ks.len()];
    for h in &hits {
        for (c, v) in counts.iter_mut().zip(h) {
            *c += v;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / permutations as f64)
        .collect())
}

/// Benjamini-Hochberg q-values, in input order.
pub fn bh_qvalues(pvalues: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::OutOfRange(bad));
    }
    let m = pvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]).then(a.cmp(&b)));
    let mut q = vec![0.0; m];
    let mut running = 1.0f64;
    for (pos, &i) in order.iter().enumerate().rev() {
        let rank = pos + 1;
        running = running.min(pvalues[i] * m as f64 / rank as f64).min(1.0);
        q[i] = running;
    }
    Ok(q)
}

/// A variable ranked by both lists with its average rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRank {
    pub id: String,
    pub rank_a: usize,
    pub rank_b: usize,
    pub mean_rank: f64,
}

fn mean_ranks(tau: &RankArray, sigma: &RankArray, keep: impl Fn(usize) -> bool) -> Vec<MeanRank> {
    let mut out: Vec<MeanRank> = (0..tau.len())
        .filter(|&i| keep(i))
        .map(|i| MeanRank {
            id: tau.ids[i].clone(),
            rank_a: tau.ranks[i],
            rank_b: sigma.ranks[i],
            mean_rank: (tau.ranks[i] + sigma.ranks[i]) as f64 / 2.0,
        })
        .collect();
    out.sort_by(|a, b| a.mean_rank.total_cmp(&b.mean_rank).then_with(|| a.id.cmp(&b.id)));
    out
}

/// Variables in both top-k sets, ordered by average rank (ties by ID).
pub fn consensus_set(tau: &RankArray, sigma: &RankArray, k: usize) -> Result<Vec<MeanRank>> {
    check_universe(tau, sigma)?;
    Ok(mean_ranks(tau, sigma, |i| {
        tau.is_ranked(i) && sigma.is_ranked(i) && tau.ranks[i] <= k && sigma.ranks[i] <= k
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRankSummary {
    pub entries: Vec<MeanRank>,
    /// No variable is ranked in both lists.
    pub empty_intersection: bool,
}

/// Average ranks over the variables ranked in both lists.
pub fn mean_rank_summary(tau: &RankArray, sigma: &RankArray) -> Result<MeanRankSummary> {
    check_universe(tau, sigma)?;
    let entries = mean_ranks(tau, sigma, |i| tau.is_ranked(i) && sigma.is_ranked(i));
    Ok(MeanRankSummary {
        empty_intersection: entries.is_empty(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub k_min: usize,
    /// Defaults to `min(|A|, |B|)`.
    pub k_max: Option<usize>,
    pub expectation_draws: usize,
    pub permutations: usize,
    pub seed: u64,
}

impl CompareConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            k_min: 1,
            k_max: None,
            expectation_draws: DEFAULT_EXPECTATION_DRAWS,
            permutations: DEFAULT_PERMUTATIONS,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRow {
    pub k: usize,
    pub canberra: f64,
    pub expected: f64,
    pub normalized: f64,
    pub p_value: f64,
    pub q_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankComparison {
    pub config: CompareConfig,
    pub n_a: usize,
    pub n_b: usize,
    pub universe: usize,
    pub intersection: usize,
    pub rows: Vec<KRow>,
    /// `k` with the smallest normalised distance (smallest `k` on ties).
    pub best_k: usize,
    pub consensus: Vec<MeanRank>,
    pub mean_ranks: MeanRankSummary,
}

/// Full comparison of two ranked ID lists over a range of `k`.
pub fn compare_rankings(a: &[String], b: &[String], config: &CompareConfig) -> Result<RankComparison> {
    let (tau, sigma, fill) = build_rank_arrays(a, b)?;
    let k_bound = a.len().min(b.len());
    let k_max = config.k_max.unwrap_or(k_bound);
    if config.k_min == 0 || config.k_min > k_max || k_max > k_bound {
        return Err(Error::InvalidParameter(format!(
            "k range {}..={k_max} must lie within 1..={k_bound}",
            config.k_min
        )));
    }
    let ks: Vec<usize> = (config.k_min..=k_max).collect();
    let expected = expected_canberra_curve(&ks, fill, config.expectation_draws, config.seed)?;
    let pvals = permutation_pvalues(&tau, &sigma, &ks, config.permutations, config.seed)?;
    let qvals = bh_qvalues(&pvals)?;
    let rows = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let ca = canberra_ranks(&tau.ranks, &sigma.ranks, k);
            Ok(KRow {
                k,
                canberra: ca,
                expected: expected[i],
                normalized: normalize(ca, expected[i])?,
                p_value: pvals[i],
                q_value: qvals[i],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best_k = rows
        .iter()
        .fold(None::<&KRow>, |best, r| match best {
            Some(b) if b.normalized <= r.normalized => Some(b),
            _ => Some(r),
        })
        .map(|r| r.k)
        .expect("k range is nonempty");
    let mean_ranks = mean_rank_summary(&tau, &sigma)?;
    Ok(RankComparison {
        config: *config,
        n_a: a.len(),
        n_b: b.len(),
        universe: fill,
        intersection: mean_ranks.entries.len(),
        rows,
        best_k,
        consensus: consensus_set(&tau, &sigma, best_k)?,
        mean_ranks,
    })
}

/// Read a ranked list: one ID per line in rank order, or `id<TAB>rank`
/// lines in any order. A first line whose second field is not an integer is
/// taken as a header.
pub fn read_ranked_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<(usize, String, Option<usize>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let rank = match fields.get(1) {
            None => None,
            Some(f) => match f.parse::<usize>() {
                Ok(r) => Some(r),
                Err(_) if rows.is_empty() && i == 0 => continue,
                Err(_) => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: i + 1,
                        message: format!("rank {f:?} is not a positive integer"),
                    })
                }
            },
        };
        if fields.len() == 1 && i == 0 && fields[0].eq_ignore_ascii_case("id") {
            continue;
        }
        rows.push((i + 1, fields[0].to_string(), rank));
    }
    let with_rank = rows.iter().filter(|r| r.2.is_some()).count();
    if with_rank != 0 && with_rank != rows.len() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: rows.iter().find(|r| r.2.is_none()).map_or(1, |r| r.0),
            message: "either every line or no line must carry a rank".into(),
        });
    }
    if with_rank > 0 {
        rows.sort_by_key(|r| r.2);
        for (expect, r) in rows.iter().enumerate() {
            if r.2 != Some(expect + 1) {
                return Err(Error::InvalidRanks(format!(
                    "{}: ranks must be 1..={} without gaps or ties",
                    path.display(),
                    rows.len()
                )));
            }
        }
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    fn full(r: &[usize]) -> RankArray {
        RankArray::new(ids(r.len()), r.iter().map(|&v| Some(v)).collect(), r.len()).unwrap()
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Average of Ca over all `p!` rankings against the identity.
    fn exhaustive_expectation(p: usize, k: usize) -> f64 {
        fn permute(v: &mut Vec<usize>, n: usize, out: &mut dyn FnMut(&[usize])) {
            if n == 1 {
                out(v);
                return;
            }
            for i in 0..n {
                permute(v, n - 1, out);
                let j = if n % 2 == 0 { i } else { 0 };
                v.swap(j, n - 1);
            }
        }
        let tau: Vec<usize> = (1..=p).collect();
        let mut sigma = tau.clone();
        let (mut total, mut count) = (0.0, 0usize);
        permute(&mut sigma, p, &mut |s| {
            total += canberra_ranks(&tau, s, k);
            count += 1;
        });
        total / count as f64
    }

    #[test]
    fn canberra_examples() {
        let t = full(&[1, 2, 3]);
        assert_eq!(canberra_topk(&t, &t, 2).unwrap(), 0.0);
        let s = full(&[2, 1, 3]);
        assert!((canberra_topk(&t, &s, 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let t = full(&[1, 2, 3, 4]);
        let s = full(&[3, 4, 1, 2]);
        assert!((canberra_topk(&t, &s, 2).unwrap() - 1.4).abs() < 1e-15);
        let other =
            RankArray::new(strings(&["a", "b", "c"]), vec![Some(1), Some(2), Some(3)], 3).unwrap();
        assert!(matches!(
            canberra_topk(&full(&[1, 2, 3]), &other, 1),
            Err(Error::UniverseMismatch(..))
        ));
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(expected_canberra(1, 1, 50, 1).unwrap(), 0.0);
        assert!((exhaustive_expectation(2, 2) - 1.0 / 3.0).abs() < 1e-15);
        let mc = expected_canberra(2, 2, 20_000, 3).unwrap();
        // Ca is 0 or 2/3 with probability 1/2 each
        let se = (1.0f64 / 3.0) / (20_000f64).sqrt();
        assert!((mc - 1.0 / 3.0).abs() < 3.0 * se);
    }

    #[test]
    fn expectation_matches_enumeration_at_p10() {
        let exact = exhaustive_expectation(10, 10);
        let draws = 20_000;
        let mut rng = substream(5, "se", 0);
        // Monte Carlo standard error from an independent sample
        let sample: Vec<f64> = (0..2000)
            .map(|_| {
                let mut s: Vec<usize> = (1..=10).collect();
                s.shuffle(&mut rng);
                canberra_ranks(&(1..=10).collect::<Vec<_>>(), &s, 10)
            })
            .collect();
        let m = sample.iter().sum::<f64>() / 2000.0;
        let sd = (sample.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 1999.0).sqrt();
        let mc = expected_canberra(10, 10, draws, 17).unwrap();
        assert!((mc - exact).abs() < 3.0 * sd / (draws as f64).sqrt(), "{mc} vs {exact}");
    }

    #[test]
    fn normalisation() {
        let t = full(&[1, 2, 3, 4]);
        assert_eq!(normalized_canberra(&t, &t, 2, 0.7).unwrap(), 0.0);
        let s = full(&[3, 4, 1, 2]);
        assert!((normalized_canberra(&t, &s, 2, 1.4).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(normalized_canberra(&t, &t, 2, 0.0).unwrap(), 0.0);
        assert!(matches!(
            normalized_canberra(&t, &s, 2, 0.0),
            Err(Error::ZeroExpectation(_))
        ));
    }

    #[test]
    fn random_pairs_normalise_to_one() {
        let (p, k) = (100, 25);
        let e = expected_canberra(k, p, 1000, 1).unwrap();
        let mut rng = substream(2, "pairs", 0);
        let mean: f64 = (0..1000)
            .map(|_| {
                let mut a: Vec<usize> = (1..=p).collect();
                let mut b = a.clone();
                a.shuffle(&mut rng);
                b.shuffle(&mut rng);
                canberra_ranks(&a, &b, k) / e
            })
            .sum::<f64>()
            / 1000.0;
        assert!((0.95..=1.05).contains(&mean), "{mean}");
    }

    #[test]
    fn pvalue_examples() {
        let t = full(&[1, 2, 3, 4, 5, 6]);
        let p = permutation_pvalues(&t, &t, &[1, 3, 6], 200, 1).unwrap();
        assert_eq!(p, vec![1.0, 1.0, 1.0]);
        let s = full(&[6, 5, 4, 3, 2, 1]);
        let p1 = permutation_pvalues(&t, &s, &[2, 4], 1, 3).unwrap();
        assert!(p1.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn pvalues_are_calibrated_for_unrelated_lists() {
        let p = 40;
        let mut rng = substream(7, "calib", 0);
        let tau = full(&(1..=p).collect::<Vec<_>>());
        let reps = 200;
        let mean: f64 = (0..reps)
            .map(|r| {
                let mut s: Vec<usize> = (1..=p).collect();
                s.shuffle(&mut rng);
                permutation_pvalues(&tau, &full(&s), &[10], 200, 100 + r).unwrap()[0]
            })
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 0.5).abs() < 0.06, "{mean}");
    }

    #[test]
    fn permutations_keep_fill_ranks_fixed() {
        let a = strings(&["x", "y", "w"]);
        let b = strings(&["y", "z"]);
        let (tau, sigma, fill) = build_rank_arrays(&a, &b).unwrap();
        assert_eq!(fill, 4);
        // identical ranked subsets: only the ranked pair can move
        let p = permutation_pvalues(&tau, &sigma, &[1, 2], 500, 4).unwrap();
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn bh_examples() {
        assert_eq!(bh_qvalues(&[0.01, 0.02, 0.03, 0.04]).unwrap(), vec![0.04; 4]);
        assert_eq!(bh_qvalues(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0; 3]);
        assert_eq!(bh_qvalues(&[0.37]).unwrap(), vec![0.37]);
        assert!(matches!(bh_qvalues(&[0.1, 1.2]), Err(Error::OutOfRange(_))));
        let q = bh_qvalues(&[0.04, 0.001, 0.5]).unwrap();
        assert!((q[1] - 0.003).abs() < 1e-15);
        assert!((q[0] - 0.06).abs() < 1e-15);
        assert!((q[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rank_array_validation() {
        let bad = RankArray::new(ids(3), vec![Some(1), Some(3), None], 3);
        assert!(matches!(bad, Err(Error::InvalidRanks(_))));
        let ok = RankArray::new(ids(3), vec![Some(2), None, Some(1)], 3).unwrap();
        assert_eq!(ok.ranks(), &[2, 3, 1]);
        assert!(!ok.is_ranked(1) && ok.is_ranked(0));
    }

    #[test]
    fn rank_array_fill_rule() {
        let (tau, sigma, fill) =
            build_rank_arrays(&strings(&["x", "y"]), &strings(&["y", "z"])).unwrap();
        assert_eq!(fill, 3);
        assert_eq!(tau.ids(), strings(&["x", "y", "z"]).as_slice());
        assert_eq!(tau.ranks(), &[1, 2, 3]);
        assert_eq!(sigma.ranks(), &[3, 1, 2]);
        let same = strings(&["a", "b", "c"]);
        let (t, s, _) = build_rank_arrays(&same, &same).unwrap();
        assert_eq!(t, s);
        assert!(matches!(
            build_rank_arrays(&strings(&["a", "a"]), &same),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn rank_arrays_for_large_partial_lists() {
        // 3430 and 2815 ranked, 2332 shared, 3913 in the union
        let shared: Vec<String> = (0..2332).map(|i| format!("g{i}")).collect();
        let mut a = shared.clone();
        a.extend((0..3430 - 2332).map(|i| format!("a{i}")));
        let mut b: Vec<String> = shared.iter().rev().cloned().collect();
        b.extend((0..2815 - 2332).map(|i| format!("b{i}")));
        let (tau, sigma, fill) = build_rank_arrays(&a, &b).unwrap();
        assert_eq!(fill, 3913);
        assert_eq!(tau.n_ranked(), 3430);
        assert_eq!(sigma.n_ranked(), 2815);
        assert_eq!(mean_rank_summary(&tau, &sigma).unwrap().entries.len(), 2332);
    }

    #[test]
    fn consensus_examples() {
        let (tau, sigma, _) =
            build_rank_arrays(&strings(&["A", "B", "D"]), &strings(&["B", "C", "A"])).unwrap();
        let c = consensus_set(&tau, &sigma, 2).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].id, "B");
        assert_eq!(c[0].mean_rank, 1.5);
        let t = full(&[2, 1, 3, 4]);
        let c = consensus_set(&t, &t, 2).unwrap();
        let got: Vec<(&str, f64)> = c.iter().map(|m| (m.id.as_str(), m.mean_rank)).collect();
        assert_eq!(got, vec![("v1", 1.0), ("v0", 2.0)]);
    }

    #[test]
    fn mean_rank_examples() {
        let (tau, sigma, _) =
            build_rank_arrays(&strings(&["a", "b"]), &strings(&["c", "d"])).unwrap();
        let s = mean_rank_summary(&tau, &sigma).unwrap();
        assert!(s.empty_intersection && s.entries.is_empty());

        let (tau, sigma, _) = build_rank_arrays(
            &strings(&["p", "q", "v"]),
            &strings(&["r", "s", "t", "u", "v"]),
        )
        .unwrap();
        let s = mean_rank_summary(&tau, &sigma).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].id, "v");
        assert_eq!(s.entries[0].mean_rank, 4.0);
    }

    #[test]
    fn mean_rank_synthetic_hundred() {
        let a: Vec<String> = (0..100).map(|i| format!("x{i}")).collect();
        let b: Vec<String> = (0..100).map(|i| format!("x{}", (i * 37) % 100)).collect();
        let (tau, sigma, _) = build_rank_arrays(&a, &b).unwrap();
        let s = mean_rank_summary(&tau, &sigma).unwrap();
        assert_eq!(s.entries.len(), 100);
        for e in &s.entries {
            let i: usize = e.id[1..].parse().unwrap();
            let rb = b.iter().position(|x| *x == e.id).unwrap() + 1;
            assert_eq!(e.mean_rank, (i + 1 + rb) as f64 / 2.0);
        }
        assert!(s.entries.windows(2).all(|w| w[0].mean_rank <= w[1].mean_rank));
    }

    #[test]
    fn identical_lists_compare_to_zero() {
        let a: Vec<String> = (0..30).map(|i| format!("p{i}")).collect();
        let mut cfg = CompareConfig::new(3);
        cfg.expectation_draws = 200;
        cfg.permutations = 200;
        let report = compare_rankings(&a, &a, &cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.normalized == 0.0 && r.p_value == 1.0));
        assert_eq!(report.best_k, 1);
        assert_eq!(report.consensus.len(), 1);
        cfg.k_max = Some(31);
        assert!(compare_rankings(&a, &a, &cfg).is_err());
    }

    #[test]
    fn ranked_list_file_formats() {
        let dir = tempfile::tempdir().unwrap();
        let plain = dir.path().join("a.txt");
        fs::write(&plain, "b\na\nc\n").unwrap();
        assert_eq!(read_ranked_list(&plain).unwrap(), strings(&["b", "a", "c"]));
        let ranked = dir.path().join("b.tsv");
        fs::write(&ranked, "id\trank\nx\t2\ny\t1\n").unwrap();
        assert_eq!(read_ranked_list(&ranked).unwrap(), strings(&["y", "x"]));
        let gap = dir.path().join("c.tsv");
        fs::write(&gap, "x\t1\ny\t3\n").unwrap();
        assert!(read_ranked_list(&gap).is_err());
    }

    fn perm_strategy(max: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (2..max).prop_flat_map(|p| {
            (
                Just((1..=p).collect::<Vec<_>>()).prop_shuffle(),
                Just((1..=p).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
    }

    proptest! {
        #[test]
        fn canberra_symmetry_and_identity((a, b) in perm_strategy(30), k in 1usize..30) {
            let ab = canberra_ranks(&a, &b, k);
            let ba = canberra_ranks(&b, &a, k);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(canberra_ranks(&a, &a, k), 0.0);
            // variables ranked beyond k in both lists contribute nothing
            let inner: f64 = a.iter().zip(&b)
                .filter(|(x, y)| **x <= k || **y <= k)
                .map(|(&x, &y)| canberra_ranks(&[x], &[y], k))
                .sum();
            prop_assert!((inner - ab).abs() < 1e-12);
        }

        #[test]
        fn bh_is_permutation_equivariant(
            ps in prop::collection::vec(0.0f64..=1.0, 1..40).prop_shuffle(),
            seed in 0u64..1000,
        ) {
            let q = bh_qvalues(&ps).unwrap();
            let mut order: Vec<usize> = (0..ps.len()).collect();
            order.shuffle(&mut substream(seed, "bh", 0));
            let shuffled: Vec<f64> = order.iter().map(|&i| ps[i]).collect();
            let qs = bh_qvalues(&shuffled).unwrap();
            for (pos, &i) in order.iter().enumerate() {
                prop_assert!((qs[pos] - q[i]).abs() < 1e-15);
            }
            for (i, &qi) in q.iter().enumerate() {
                prop_assert!((0.0..=1.0).contains(&qi));
                prop_assert!(qi >= ps[i] - 1e-15);
                for (j, &qj) in q.iter().enumerate() {
                    if ps[i] <= ps[j] { prop_assert!(qi <= qj + 1e-15); }
                }
            }
        }

        #[test]
        fn consensus_is_symmetric((a, b) in perm_strategy(25), k in 1usize..25) {
            let (t, s) = (full(&a), full(&b));
            let ts = consensus_set(&t, &s, k).unwrap();
            let st = consensus_set(&s, &t, k).unwrap();
            let mut x: Vec<(String, f64)> = ts.into_iter().map(|m| (m.id, m.mean_rank)).collect();
            let mut y: Vec<(String, f64)> = st.into_iter().map(|m| (m.id, m.mean_rank)).collect();
            x.sort_by(|p, q| p.0.cmp(&q.0));
            y.sort_by(|p, q| p.0.cmp(&q.0));
            prop_assert_eq!(x, y);
        }
    }
}
