use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::preference::{Rating, RatingTable, UserId};

/// Test items every eligible user keeps beyond the training profile.
pub const MIN_TEST_ITEMS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct UserSplit {
    pub user: UserId,
    pub train: Vec<Rating>,
    pub test: Vec<Rating>,
}

/// Per-user train/test partition with exactly `upl` training ratings.
#[derive(Clone, Debug, PartialEq)]
pub struct UplSplit {
    pub upl: usize,
    pub seed: u64,
    pub users: Vec<UserSplit>,
}

impl UplSplit {
    pub fn train_ratings(&self) -> Vec<Rating> {
        self.users.iter().flat_map(|u| u.train.iter().copied()).collect()
    }

    pub fn eligible_users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.users.iter().map(|u| u.user)
    }
}

/// Samples `upl` training ratings uniformly per eligible user, users in
/// ascending order from one generator seeded with `seed`. Users with
/// fewer than `upl + 10` ratings are left out entirely.
pub fn upl_split(table: &RatingTable, upl: usize, seed: u64) -> Result<UplSplit> {
    if upl == 0 {
        return Err(Error::InvalidConfig("UPL must be at least 1".into()));
    }
    let threshold = upl + MIN_TEST_ITEMS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users = Vec::new();
    for (user, ratings) in table.by_user() {
        if ratings.len() < threshold {
            continue;
        }
        let mut chosen = vec![false; ratings.len()];
        for k in sample(&mut rng, ratings.len(), upl) {
            chosen[k] = true;
        }
        let (train, test) = ratings.iter().zip(&chosen).fold(
            (Vec::with_capacity(upl), Vec::new()),
            |(mut train, mut test), (r, &c)| {
                if c { train.push(*r) } else { test.push(*r) }
                (train, test)
            },
        );
        users.push(UserSplit { user, train, test });
    }
    if users.is_empty() {
        return Err(Error::NoEligibleUsers { upl, threshold });
    }
    Ok(UplSplit { upl, seed, users })
}

/// Per-sample seeds drawn from one master seed.
pub fn sample_seeds(master: u64, samples: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..samples).map(|_| rng.next_u64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::RatingScale;

    fn table(counts: &[usize]) -> RatingTable {
        let labels: Vec<(String, String, f64)> = counts
            .iter()
            .enumerate()
            .flat_map(|(u, &n)| (0..n).map(move |i| (format!("u{u}"), format!("i{i}"), (1 + i % 5) as f64)))
            .collect();
        RatingTable::from_labelled(
            RatingScale::FIVE_STAR,
            labels.iter().map(|(u, i, v)| (u.as_str(), i.as_str(), *v)),
        )
        .unwrap()
    }

    #[test]
    fn eligibility_boundary() {
        let t = table(&[14, 15, 30]);
        let s = upl_split(&t, 5, 1).unwrap();
        let sizes: Vec<(usize, usize)> = s.users.iter().map(|u| (u.train.len(), u.test.len())).collect();
        assert_eq!(sizes, [(5, 10), (5, 25)]);
    }

    #[test]
    fn no_eligible_users_names_the_threshold() {
        let t = table(&[12]);
        match upl_split(&t, 5, 1) {
            Err(Error::NoEligibleUsers { threshold, .. }) => assert_eq!(threshold, 15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seeds_drive_the_sample() {
        let t = table(&[40, 40]);
        assert_eq!(upl_split(&t, 10, 3).unwrap(), upl_split(&t, 10, 3).unwrap());
        let differing = (0..100u64)
            .filter(|&s| upl_split(&t, 10, s).unwrap().users != upl_split(&t, 10, s + 1000).unwrap().users)
            .count();
        assert!(differing >= 99);
    }

    #[test]
    fn sample_seeds_are_reproducible() {
        assert_eq!(sample_seeds(42, 5), sample_seeds(42, 5));
        assert_eq!(sample_seeds(42, 5).len(), 5);
        assert_ne!(sample_seeds(42, 5), sample_seeds(43, 5));
    }
}
