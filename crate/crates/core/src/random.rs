//! Sources of field randomness.
//!
//! The protocol consumes randomness only through [`RandomSource`], so the
//! same code path runs under a seeded RNG and under the exhaustive oracle,
//! which feeds every possible assignment through [`Scripted`].

use rand::{Rng, RngCore};

use crate::field::{FieldElement, FieldSpec};

pub trait RandomSource {
    /// A uniform element of `spec`.
    fn draw(&mut self, spec: FieldSpec) -> FieldElement;
}

impl<S: RandomSource + ?Sized> RandomSource for &mut S {
    fn draw(&mut self, spec: FieldSpec) -> FieldElement {
        (**self).draw(spec)
    }
}

/// Adapts any `rand` generator.
#[derive(Debug, Clone)]
pub struct RngSource<R>(pub R);

impl<R: RngCore> RandomSource for RngSource<R> {
    fn draw(&mut self, spec: FieldSpec) -> FieldElement {
        spec.elem(self.0.gen_range(0..spec.modulus()))
    }
}

/// Replays a fixed list of values. Running past the end yields zeros and is
/// recorded in `overrun`, so callers can size their scripts.
#[derive(Debug, Clone, Default)]
pub struct Scripted {
    values: Vec<u64>,
    pos: usize,
    overrun: usize,
}

impl Scripted {
    pub fn new(values: Vec<u64>) -> Self {
        Self {
            values,
            pos: 0,
            overrun: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.pos + self.overrun
    }

    pub fn overrun(&self) -> usize {
        self.overrun
    }
}

impl RandomSource for Scripted {
    fn draw(&mut self, spec: FieldSpec) -> FieldElement {
        match self.values.get(self.pos) {
            Some(&v) => {
                self.pos += 1;
                spec.elem(v)
            }
            None => {
                self.overrun += 1;
                spec.zero()
            }
        }
    }
}

/// Counts draws made through the inner source.
#[derive(Debug, Clone)]
pub struct Counting<S> {
    pub inner: S,
    pub count: usize,
}

impl<S> Counting<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, count: 0 }
    }
}

impl<S: RandomSource> RandomSource for Counting<S> {
    fn draw(&mut self, spec: FieldSpec) -> FieldElement {
        self.count += 1;
        self.inner.draw(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scripted_replays_then_overruns() {
        let f = FieldSpec::new(7).unwrap();
        let mut s = Scripted::new(vec![3, 9]);
        assert_eq!(s.draw(f).value(), 3);
        assert_eq!(s.draw(f).value(), 2);
        assert_eq!(s.draw(f).value(), 0);
        assert_eq!((s.consumed(), s.overrun()), (3, 1));
    }

    #[test]
    fn rng_source_in_range_and_counted() {
        let f = FieldSpec::new(5).unwrap();
        let mut c = Counting::new(RngSource(ChaCha8Rng::seed_from_u64(1)));
        for _ in 0..100 {
            assert!(c.draw(f).value() < 5);
        }
        assert_eq!(c.count, 100);
    }
}
