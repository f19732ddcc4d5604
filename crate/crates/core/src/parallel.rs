//! Deterministic data-parallel evaluation over grid nodes.
//!
//! Work is split into `workers` contiguous index chunks and every output
//! element is written exactly once as a pure function of the inputs, so the
//! result is bitwise identical for any worker count and any scheduling.
//! Chunks run on the shared rayon pool; reductions that are sensitive to
//! summation order stay sequential elsewhere.

/// Fills two output slices by evaluating `fill(start, chunk_a, chunk_b)` over
/// contiguous chunks. `fill` receives the absolute start index of its chunk.
pub fn chunked_fill2<F>(workers: usize, out_a: &mut [f64], out_b: &mut [f64], fill: F)
where
    F: Fn(usize, &mut [f64], &mut [f64]) + Sync,
{
    let n = out_a.len();
    debug_assert_eq!(n, out_b.len());
    let workers = workers.max(1).min(n.max(1));
    if workers == 1 {
        fill(0, out_a, out_b);
        return;
    }
    let chunk = n.div_ceil(workers);
    rayon::scope(|scope| {
        let fill = &fill;
        let mut rest_a = out_a;
        let mut rest_b = out_b;
        let mut start = 0;
        while !rest_a.is_empty() {
            let take = chunk.min(rest_a.len());
            let (head_a, tail_a) = rest_a.split_at_mut(take);
            let (head_b, tail_b) = rest_b.split_at_mut(take);
            let s = start;
            scope.spawn(move |_| fill(s, head_a, head_b));
            rest_a = tail_a;
            rest_b = tail_b;
            start += take;
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_across_worker_counts() {
        let n = 1003;
        let src: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let eval = |workers: usize| {
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            chunked_fill2(workers, &mut a, &mut b, |start, ca, cb| {
                for (k, (va, vb)) in ca.iter_mut().zip(cb.iter_mut()).enumerate() {
                    let i = start + k;
                    *va = src[i] * src[i] - 0.5;
                    *vb = src[i].exp();
                }
            });
            (a, b)
        };
        let (a1, b1) = eval(1);
        for w in [2, 3, 8, 64] {
            let (aw, bw) = eval(w);
            assert_eq!(a1, aw);
            assert_eq!(b1, bw);
        }
    }
}
