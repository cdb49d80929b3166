//! Grid-sized storage with global live/peak byte accounting.
//!
//! Every field and every grid-sized scratch array goes through [`Tracked`], so
//! the peak figure is the one the resource predictor is checked against.

use std::ops::{Deref, DerefMut};
use std::sync::atomic::{AtomicUsize, Ordering};

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

fn register(bytes: usize) {
    let now = LIVE.fetch_add(bytes, Ordering::Relaxed) + bytes;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

fn release(bytes: usize) {
    LIVE.fetch_sub(bytes, Ordering::Relaxed);
}

/// Bytes currently held by tracked buffers.
pub fn live_bytes() -> usize {
    LIVE.load(Ordering::Relaxed)
}

/// High-water mark of [`live_bytes`] since the last [`reset_peak`].
pub fn peak_bytes() -> usize {
    PEAK.load(Ordering::Relaxed)
}

/// Restart peak accounting from the current live figure.
pub fn reset_peak() {
    PEAK.store(LIVE.load(Ordering::Relaxed), Ordering::Relaxed);
}

/// A `Vec<T>` whose capacity is counted in the global allocation ledger.
#[derive(Debug, PartialEq)]
pub struct Tracked<T: Copy> {
    data: Vec<T>,
}

impl<T: Copy> Tracked<T> {
    pub fn from_vec(data: Vec<T>) -> Self {
        register(data.len() * std::mem::size_of::<T>());
        Self { data }
    }

    pub fn filled(len: usize, value: T) -> Self {
        Self::from_vec(vec![value; len])
    }

    pub fn into_vec(mut self) -> Vec<T> {
        let data = std::mem::take(&mut self.data);
        release(data.len() * std::mem::size_of::<T>());
        data
    }
}

impl<T: Copy> Clone for Tracked<T> {
    fn clone(&self) -> Self {
        Self::from_vec(self.data.clone())
    }
}

impl<T: Copy> Drop for Tracked<T> {
    fn drop(&mut self) {
        release(self.data.len() * std::mem::size_of::<T>());
    }
}

impl<T: Copy> Deref for Tracked<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.data
    }
}

impl<T: Copy> DerefMut for Tracked<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accounting_follows_lifetimes() {
        let before = live_bytes();
        let a = Tracked::filled(1000, 0.0f64);
        assert!(live_bytes() >= before + 8000);
        let b = a.clone();
        drop(a);
        let v = b.into_vec();
        assert_eq!(v.len(), 1000);
        assert!(peak_bytes() >= before + 16000);
    }
}
