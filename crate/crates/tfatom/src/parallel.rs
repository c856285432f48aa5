//! Thin data-parallel map helpers. With the `parallel` feature (default)
//! these dispatch through rayon; without it they run sequentially with the
//! same signature, so callers never branch on the feature themselves.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn try_par_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_par_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    F: Fn(&T) -> Result<U, E>,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<i64> = (0..1000).collect();
        let ys = par_map(&xs, |&x| x * x);
        assert_eq!(ys.len(), 1000);
        assert!(ys.iter().enumerate().all(|(i, &y)| y == (i as i64).pow(2)));
    }

    #[test]
    fn try_map_propagates_first_error() {
        let xs: Vec<i64> = (0..10).collect();
        let r = try_par_map(&xs, |&x| if x == 7 { Err("boom") } else { Ok(x) });
        assert_eq!(r, Err("boom"));
        let ok = try_par_map(&xs, |&x| Ok::<_, ()>(x + 1));
        assert_eq!(ok.unwrap()[9], 10);
    }
}
