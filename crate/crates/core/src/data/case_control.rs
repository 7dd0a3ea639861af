use rand::seq::{index::sample, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::model::PuDataset;

/// A PU pair drawn from a labeled pool, with bookkeeping for evaluation.
#[derive(Debug, Clone)]
pub struct CaseControlDraw {
    pub dataset: PuDataset,
    /// Pool rows used for the positive set.
    pub positive_indices: Vec<usize>,
    /// Pool rows used for the unlabeled set, in dataset order.
    pub unlabeled_indices: Vec<usize>,
    /// Hidden labels of the unlabeled rows (after any flip).
    pub unlabeled_labels: Vec<i8>,
}

fn draw(pool: &[usize], k: usize, class: &'static str, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if k > pool.len() {
        return Err(Error::InsufficientPool {
            class,
            needed: k,
            available: pool.len(),
        });
    }
    Ok(sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect())
}

/// Builds a PU pair whose unlabeled set holds exactly
/// `round(target_prior * n_unlabeled)` positives.
///
/// The positive set and the unlabeled set are drawn independently, so a pool
/// row can appear in both but never twice in one.
pub fn make_case_control(
    pool: &LabeledDataset,
    n_pos: usize,
    n_unlabeled: usize,
    target_prior: f64,
    flip: bool,
    seed: u64,
) -> Result<CaseControlDraw> {
    if !(0.0..=1.0).contains(&target_prior) {
        return Err(Error::InvalidArgument(format!("target prior {target_prior} outside [0, 1]")));
    }
    if n_pos == 0 || n_unlabeled == 0 {
        return Err(Error::InvalidArgument("set sizes must be >= 1".into()));
    }
    let flipped;
    let pool = if flip {
        flipped = pool.flipped();
        &flipped
    } else {
        pool
    };
    let pos = pool.class_indices(1);
    let neg = pool.class_indices(-1);
    let k_pos = (target_prior * n_unlabeled as f64).round() as usize;
    let k_neg = n_unlabeled - k_pos;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positive_indices = draw(&pos, n_pos, "positive", &mut rng)?;
    let mut unlabeled_indices = draw(&pos, k_pos, "positive", &mut rng)?;
    unlabeled_indices.extend(draw(&neg, k_neg, "negative", &mut rng)?);
    unlabeled_indices.shuffle(&mut rng);

    let unlabeled_labels = unlabeled_indices.iter().map(|&i| pool.labels()[i]).collect();
    let dataset = PuDataset::new(
        pool.features().select_rows(&positive_indices),
        pool.features().select_rows(&unlabeled_indices),
    )?;
    Ok(CaseControlDraw {
        dataset,
        positive_indices,
        unlabeled_indices,
        unlabeled_labels,
    })
}

/// Random split into `(train, test)` with `test_size` rows held out.
pub fn train_test_split(
    data: &LabeledDataset,
    test_size: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if test_size >= data.len() {
        return Err(Error::InvalidArgument(format!(
            "test size {test_size} leaves no training rows out of {}",
            data.len()
        )));
    }
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test, train) = idx.split_at(test_size);
    Ok((data.select(train), data.select(test)))
}
