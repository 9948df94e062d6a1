//! Providers of the chains' random choices.
//!
//! Every chain pulls its randomness through [`SwitchSource`], so a run can be
//! recorded once and replayed bit-identically through any other
//! implementation.

use std::collections::VecDeque;

use crate::chain::SwitchDescriptor;
use crate::random::{binomial, parallel_shuffle, shuffle_parts_for, RandomStream};

/// Length and direction bits of one global switch, drawn after the edge slots
/// were arranged into switch order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GlobalDraw {
    /// Number of switches `ℓ`; switch `k` operates on slots `2k` and `2k + 1`.
    pub len: usize,
    /// One direction bit per switch.
    pub directions: Vec<bool>,
}

/// An explicit global switch: a permutation of the edge positions, the number
/// of switches and their direction bits.
///
/// Switch `k` pairs positions `order[2k]` and `order[2k + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSwitch {
    pub order: Vec<usize>,
    pub len: usize,
    pub directions: Vec<bool>,
}

impl GlobalSwitch {
    /// Checks that `order` is a permutation of `0..m` and `len` fits.
    pub fn is_valid_for(&self, m: usize) -> bool {
        if self.order.len() != m || self.len > m / 2 || self.directions.len() != self.len {
            return false;
        }
        let mut seen = vec![false; m];
        self.order.iter().all(|&p| p < m && !std::mem::replace(&mut seen[p], true))
    }

    /// Arranges `slots` so that the switch pairs become consecutive.
    pub fn arrange<T: Copy>(&self, slots: &mut [T]) {
        let arranged: Vec<T> = self.order.iter().map(|&p| slots[p]).collect();
        slots.copy_from_slice(&arranged);
    }
}

/// Source of single-switch descriptors and global switches.
pub trait SwitchSource {
    /// Next single switch on an edge list of length `edge_count >= 2`.
    fn next_switch(&mut self, edge_count: usize) -> SwitchDescriptor;

    /// Permutes `slots` into the order of the next global switch and returns
    /// its length and direction bits. The randomness consumed must not depend
    /// on the slot contents.
    fn next_global<T: Copy + Send + Sync>(&mut self, slots: &mut [T]) -> GlobalDraw;
}

impl<S: SwitchSource + ?Sized> SwitchSource for &mut S {
    fn next_switch(&mut self, edge_count: usize) -> SwitchDescriptor {
        (**self).next_switch(edge_count)
    }

    fn next_global<T: Copy + Send + Sync>(&mut self, slots: &mut [T]) -> GlobalDraw {
        (**self).next_global(slots)
    }
}

/// The chains' native randomness: uniform pairs `i != j`, unbiased direction
/// bits, uniform shuffles and `ℓ ~ Binomial(⌊m/2⌋, 1 - P_L)`.
#[derive(Clone, Debug)]
pub struct RandomSource {
    stream: RandomStream,
    lazy_probability: f64,
}

impl RandomSource {
    pub fn new(seed: u64, lazy_probability: f64) -> Self {
        Self::from_stream(RandomStream::new(seed), lazy_probability)
    }

    pub fn from_stream(stream: RandomStream, lazy_probability: f64) -> Self {
        assert!(
            lazy_probability > 0.0 && lazy_probability < 1.0,
            "lazy probability must lie in (0, 1)"
        );
        RandomSource { stream, lazy_probability }
    }

    pub fn lazy_probability(&self) -> f64 {
        self.lazy_probability
    }

    pub fn stream_mut(&mut self) -> &mut RandomStream {
        &mut self.stream
    }
}

impl SwitchSource for RandomSource {
    fn next_switch(&mut self, edge_count: usize) -> SwitchDescriptor {
        assert!(edge_count >= 2, "a switch needs two edges");
        let i = self.stream.index(edge_count);
        let j = loop {
            let j = self.stream.index(edge_count);
            if j != i {
                break j;
            }
        };
        let g = self.stream.bit();
        SwitchDescriptor::new(i, j, g)
    }

    fn next_global<T: Copy + Send + Sync>(&mut self, slots: &mut [T]) -> GlobalDraw {
        parallel_shuffle(slots, &mut self.stream, shuffle_parts_for(slots.len()));
        let trials = (slots.len() / 2) as u64;
        let len = binomial(&mut self.stream, trials, 1.0 - self.lazy_probability) as usize;
        let mut directions = Vec::with_capacity(len);
        while directions.len() < len {
            let word = self.stream.next_u64();
            let take = (len - directions.len()).min(64);
            directions.extend((0..take).map(|b| word >> b & 1 == 1));
        }
        GlobalDraw { len, directions }
    }
}

/// Replays recorded choices in order. Panics when exhausted.
#[derive(Clone, Debug, Default)]
pub struct ReplaySource {
    switches: VecDeque<SwitchDescriptor>,
    globals: VecDeque<GlobalSwitch>,
}

impl ReplaySource {
    pub fn new(switches: Vec<SwitchDescriptor>, globals: Vec<GlobalSwitch>) -> Self {
        ReplaySource {
            switches: switches.into(),
            globals: globals.into(),
        }
    }

    pub fn switches(switches: Vec<SwitchDescriptor>) -> Self {
        Self::new(switches, Vec::new())
    }

    pub fn globals(globals: Vec<GlobalSwitch>) -> Self {
        Self::new(Vec::new(), globals)
    }

    pub fn remaining_switches(&self) -> usize {
        self.switches.len()
    }

    pub fn remaining_globals(&self) -> usize {
        self.globals.len()
    }
}

impl SwitchSource for ReplaySource {
    fn next_switch(&mut self, edge_count: usize) -> SwitchDescriptor {
        let s = self.switches.pop_front().expect("replay source has no switches left");
        assert!(s.i < edge_count && s.j < edge_count, "replayed switch out of range");
        s
    }

    fn next_global<T: Copy + Send + Sync>(&mut self, slots: &mut [T]) -> GlobalDraw {
        let gs = self.globals.pop_front().expect("replay source has no global switches left");
        assert!(gs.is_valid_for(slots.len()), "replayed global switch does not fit");
        gs.arrange(slots);
        GlobalDraw {
            len: gs.len,
            directions: gs.directions,
        }
    }
}

/// Wraps a source and records everything it hands out.
#[derive(Clone, Debug)]
pub struct RecordingSource<S> {
    inner: S,
    switches: Vec<SwitchDescriptor>,
    globals: Vec<GlobalSwitch>,
}

impl<S: SwitchSource> RecordingSource<S> {
    pub fn new(inner: S) -> Self {
        RecordingSource {
            inner,
            switches: Vec::new(),
            globals: Vec::new(),
        }
    }

    pub fn recorded_switches(&self) -> &[SwitchDescriptor] {
        &self.switches
    }

    pub fn recorded_globals(&self) -> &[GlobalSwitch] {
        &self.globals
    }

    /// A replay source for everything recorded so far.
    pub fn replay(&self) -> ReplaySource {
        ReplaySource::new(self.switches.clone(), self.globals.clone())
    }
}

impl<S: SwitchSource> SwitchSource for RecordingSource<S> {
    fn next_switch(&mut self, edge_count: usize) -> SwitchDescriptor {
        let s = self.inner.next_switch(edge_count);
        self.switches.push(s);
        s
    }

    fn next_global<T: Copy + Send + Sync>(&mut self, slots: &mut [T]) -> GlobalDraw {
        let mut order: Vec<usize> = (0..slots.len()).collect();
        let draw = self.inner.next_global(&mut order);
        let gs = GlobalSwitch {
            order,
            len: draw.len,
            directions: draw.directions.clone(),
        };
        gs.arrange(slots);
        self.globals.push(gs);
        draw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_pairs_are_distinct() {
        let mut src = RandomSource::new(1, 0.01);
        for _ in 0..10_000 {
            let s = src.next_switch(3);
            assert_ne!(s.i, s.j);
            assert!(s.i < 3 && s.j < 3);
        }
    }

    #[test]
    fn recording_matches_direct_draws() {
        let mut direct: Vec<u32> = (0..100).collect();
        let mut recorded = direct.clone();
        let d1 = RandomSource::new(8, 0.3).next_global(&mut direct);
        let mut rec = RecordingSource::new(RandomSource::new(8, 0.3));
        let d2 = rec.next_global(&mut recorded);
        assert_eq!(d1, d2);
        assert_eq!(direct, recorded);

        let mut replayed: Vec<u32> = (0..100).collect();
        let d3 = rec.replay().next_global(&mut replayed);
        assert_eq!(d1, d3);
        assert_eq!(direct, replayed);
    }

    #[test]
    fn global_len_is_bounded() {
        let mut src = RandomSource::new(2, 0.5);
        for m in 0..20 {
            let mut slots: Vec<usize> = (0..m).collect();
            let d = src.next_global(&mut slots);
            assert!(d.len <= m / 2);
            assert_eq!(d.directions.len(), d.len);
        }
    }

    #[test]
    fn validity_check() {
        let gs = GlobalSwitch { order: vec![1, 0, 2], len: 1, directions: vec![true] };
        assert!(gs.is_valid_for(3));
        assert!(!gs.is_valid_for(4));
        let dup = GlobalSwitch { order: vec![1, 1, 2], len: 1, directions: vec![true] };
        assert!(!dup.is_valid_for(3));
    }
}
