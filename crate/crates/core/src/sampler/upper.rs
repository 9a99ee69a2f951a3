use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::SamplerError;
use crate::enumerate::{random_seed_subgraph, DEFAULT_SEED_ATTEMPTS};
use crate::exact::ExactError;
use crate::graph::AttributedGraph;
use crate::hon::hon_neighborhood;
use crate::relation::FilterFn;
use crate::subgraph::Subgraph;

/// Default burn-in: `10 · k · ⌈ln n⌉` steps.
pub fn default_burn_in(k: usize, node_count: usize) -> usize {
    10 * k * (node_count.max(1) as f64).ln().ceil() as usize
}

/// Simple random walk on the `h`-restricted HON.
///
/// Iterating yields the state after burn-in, then one state per step. An
/// isolated state yields an error and ends the iteration.
pub struct UpperWalk<'g> {
    graph: &'g AttributedGraph,
    filter: FilterFn,
    rng: ChaCha8Rng,
    current: Subgraph,
    burn_in: usize,
    started: bool,
    failed: bool,
    steps: usize,
}

impl<'g> UpperWalk<'g> {
    /// Starts at `start`, or at a random seed subgraph when `None`.
    pub fn new(
        graph: &'g AttributedGraph,
        k: usize,
        filter: FilterFn,
        burn_in: usize,
        start: Option<Subgraph>,
        mut rng: ChaCha8Rng,
    ) -> Result<Self, SamplerError> {
        let current = match start {
            Some(s) => {
                if !filter.accepts(graph, &s) {
                    return Err(ExactError::InvalidStart(s).into());
                }
                s
            }
            None => random_seed_subgraph(graph, k, &filter, DEFAULT_SEED_ATTEMPTS, &mut rng)?,
        };
        Ok(Self { graph, filter, rng, current, burn_in, started: false, failed: false, steps: 0 })
    }

    /// Walk steps taken so far, burn-in included.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn advance(&mut self) -> Result<(), SamplerError> {
        let neighbors = hon_neighborhood(self.graph, &self.current, &self.filter);
        if neighbors.is_empty() {
            return Err(SamplerError::StuckAtIsolatedNode(self.current.clone()));
        }
        self.current = neighbors[self.rng.gen_range(0..neighbors.len())].clone();
        self.steps += 1;
        Ok(())
    }
}

impl Iterator for UpperWalk<'_> {
    type Item = Result<Subgraph, SamplerError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let moved = if self.started {
            self.advance()
        } else {
            self.started = true;
            (0..self.burn_in).try_for_each(|_| self.advance())
        };
        match moved {
            Ok(()) => Some(Ok(self.current.clone())),
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}
