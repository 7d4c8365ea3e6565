use super::EvalResult;

/// Generalized Laguerre polynomial L_n^{(a)}(x) by the three-term recurrence.
pub fn laguerre_assoc(n: u32, a: f64, x: f64) -> EvalResult {
    if n == 0 {
        return EvalResult::exact(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    let mut mag = 1.0f64.max(cur.abs());
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        mag = mag.max(cur.abs()).max(prev.abs() * (1.0 + x.abs()));
    }
    EvalResult::new(cur, 4.0 * f64::EPSILON * mag * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(laguerre_assoc(0, 0.7, 3.0).value, 1.0);
        assert!((laguerre_assoc(1, 0.7, 3.0).value + 1.3).abs() < 1e-15);
        // L_2^{(a)}(x) = ((a+1)(a+2) - 2(a+2)x + x²)/2
        let (a, x) = (0.4, 1.3);
        let expect = ((a + 1.0) * (a + 2.0) - 2.0 * (a + 2.0) * x + x * x) / 2.0;
        assert!((laguerre_assoc(2, a, x).value - expect).abs() < 1e-15);
    }
}
