use foliate::C64;

/// `RE` or `RE,IM`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    let z = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected RE or RE,IM, got '{s}'")),
    };
    if !z.is_finite() {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(z)
}

/// `START:STOP:N` (real, endpoints included) or `z1;z2;...`.
pub fn parse_grid(s: &str) -> Result<Vec<C64>, String> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected START:STOP:N, got '{s}'"));
        };
        let a: f64 = a.parse().map_err(|e| format!("bad start '{a}': {e}"))?;
        let b: f64 = b.parse().map_err(|e| format!("bad stop '{b}': {e}"))?;
        let n: usize = n.parse().map_err(|e| format!("bad count '{n}': {e}"))?;
        return match n {
            0 => Err("grid needs at least one point".into()),
            1 => Ok(vec![C64::new(a, 0.0)]),
            _ => Ok((0..n).map(|i| C64::new(a + (b - a) * i as f64 / (n - 1) as f64, 0.0)).collect()),
        };
    }
    let ks = s
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()?;
    if ks.is_empty() {
        return Err("empty k grid".into());
    }
    Ok(ks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_includes_endpoints() {
        let g = parse_grid("0.5:3:6").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], C64::new(0.5, 0.0));
        assert_eq!(g[5], C64::new(3.0, 0.0));
    }

    #[test]
    fn explicit_list() {
        let g = parse_grid("1; 2,0.5").unwrap();
        assert_eq!(g, vec![C64::new(1.0, 0.0), C64::new(2.0, 0.5)]);
        assert!(parse_grid("1,2,3").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_complex("nan").is_err());
    }
}
