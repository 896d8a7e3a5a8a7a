use super::{CopulaConfig, QuantileMethod, WaterfallSample, MIN_CHANGE};

/// Precomputed inverse-ECDF lookup for one sample.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    method: QuantileMethod,
    grid: Vec<f64>,
    /// ECDF evaluated at each grid point (grid method) or the sorted sample
    /// (exact method).
    table: Vec<f64>,
}

impl QuantileTable {
    pub fn new(sample: &WaterfallSample, cfg: &CopulaConfig) -> Self {
        let mut sorted = sample.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        match cfg.quantile {
            QuantileMethod::Exact => Self {
                method: QuantileMethod::Exact,
                grid: Vec::new(),
                table: sorted,
            },
            QuantileMethod::Grid => {
                let n = sorted.len() as f64;
                let grid = cfg.grid();
                let table = grid
                    .iter()
                    .map(|&x| sorted.partition_point(|&v| v <= x) as f64 / n)
                    .collect();
                Self {
                    method: QuantileMethod::Grid,
                    grid,
                    table,
                }
            }
        }
    }

    /// Inverse ECDF at `u`, floored at -100. Under the grid method a `u` above
    /// the ECDF at the last grid point maps to the grid maximum.
    pub fn quantile(&self, u: f64) -> f64 {
        let x = match self.method {
            QuantileMethod::Grid => {
                let i = self.table.partition_point(|&y| y < u);
                self.grid[i.min(self.grid.len() - 1)]
            }
            QuantileMethod::Exact => {
                let n = self.table.len();
                let k = ((u * n as f64).ceil() as usize).clamp(1, n);
                self.table[k - 1]
            }
        };
        x.max(MIN_CHANGE)
    }
}

/// Single inverse-ECDF evaluation; see [`QuantileTable`] for repeated use.
pub fn empirical_quantile(sample: &WaterfallSample, u: f64, cfg: &CopulaConfig) -> f64 {
    QuantileTable::new(sample, cfg).quantile(u)
}
