use rand::Rng;

pub const TABLE_SIZE: usize = 10_000_000;
const POWER: f64 = 0.75;

/// Noise distribution for negative sampling: token `i` occupies a share of
/// the table proportional to `count_i^0.75`.
#[derive(Debug, Clone)]
pub struct NegativeTable {
    table: Vec<u32>,
}

impl NegativeTable {
    pub fn new(counts: &[u64]) -> Self {
        Self::with_size(counts, TABLE_SIZE)
    }

    pub fn with_size(counts: &[u64], size: usize) -> Self {
        assert!(!counts.is_empty() && size > 0);
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(POWER)).collect();
        let total: f64 = weights.iter().sum();
        let mut table = Vec::with_capacity(size);
        let mut cumulative = 0.0;
        for (i, w) in weights.iter().enumerate() {
            cumulative += w;
            let end = if i + 1 == weights.len() {
                size
            } else {
                ((cumulative / total) * size as f64).round() as usize
            };
            while table.len() < end.min(size) {
                table.push(i as u32);
            }
        }
        NegativeTable { table }
    }

    #[inline]
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        self.table[rng.random_range(0..self.table.len())]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}
