use ndarray::Array2;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{standardize, GenotypeMatrix, Phenotype, StandardizedData};
use crate::rng::substream;

/// Random 0/1/2 genotypes with response `sum_k effects[k].1 * x_{effects[k].0} + noise`.
pub fn random_data(n: usize, p: usize, seed: u64, effects: &[(usize, f64)]) -> StandardizedData {
    let mut rng = substream(seed, "testutil", 0);
    let values = Array2::from_shape_fn((n, p), |_| rng.random_range(0..3u8));
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            effects
                .iter()
                .map(|&(j, b)| b * f64::from(values[[i, j]]))
                .sum::<f64>()
                + noise
        })
        .collect();
    let samples: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let snps: Vec<String> = (0..p).map(|j| format!("rs{j}")).collect();
    let g = GenotypeMatrix::new(samples.clone(), snps, values).unwrap();
    let ph = Phenotype::new(samples, y).unwrap();
    standardize(&g, &ph).unwrap()
}
