//! Grid specifications: `log:<lo>:<hi>:<n>`, `lin:<lo>:<hi>:<n>` and
//! `list:<v1>,<v2>,...`.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn number(s: &str, what: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("grid {what} `{s}` is not a number"))
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| format!("grid `{text}` must start with log:, lin: or list:"))?;
        let values = match kind {
            "log" | "lin" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [lo, hi, n] = parts[..] else {
                    return Err(format!("grid `{text}` must look like {kind}:<lo>:<hi>:<n>"));
                };
                let (lo, hi) = (number(lo, "bound")?, number(hi, "bound")?);
                let n: usize = n.trim().parse().map_err(|_| format!("grid size `{n}` is not a positive integer"))?;
                if n == 0 {
                    return Err("grid size must be >= 1".into());
                }
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(format!("grid `{text}` has non-finite bounds"));
                }
                if kind == "log" && !(lo > 0.0 && hi > 0.0) {
                    return Err(format!("log grid `{text}` needs positive bounds"));
                }
                let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                (0..n)
                    .map(|i| match (kind, i) {
                        (_, 0) => lo,
                        (_, i) if i + 1 == n => hi,
                        ("log", i) => lo * (hi / lo).powf(frac(i)),
                        (_, i) => lo + (hi - lo) * frac(i),
                    })
                    .collect()
            }
            "list" => rest
                .split(',')
                .map(|v| number(v, "value"))
                .collect::<Result<Vec<f64>, String>>()?,
            other => return Err(format!("unknown grid kind `{other}` (expected log, lin or list)")),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("grid `{text}` contains non-finite values"));
        }
        Ok(Grid(values))
    }
}
