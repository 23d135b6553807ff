//! CSV emitters for the size model: a free sweep and the fixed reference
//! tables (numbered 4 to 8).
//!
//! Sizes are exact bit counts. Ratios are printed to three decimals.

use std::fmt::Write;

use ccn_fib_core::size_model::{
    breakeven_prefix_len, model_sizes, size_difference, size_ratio, ModelConfig, ModelError,
    Variant,
};

/// Setup shared by the fixed tables.
pub const FPP: f64 = 1e-6;
pub const PREFIX_BYTES: u64 = 15;
pub const FACES: std::ops::RangeInclusive<u64> = 10..=15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Table {
    Sizes = 4,
    Differences = 5,
    Capacities = 6,
    Breakeven = 7,
    Ratios = 8,
}

impl Table {
    pub fn from_number(n: u8) -> Option<Self> {
        Some(match n {
            4 => Table::Sizes,
            5 => Table::Differences,
            6 => Table::Capacities,
            7 => Table::Breakeven,
            8 => Table::Ratios,
            _ => return None,
        })
    }

    pub fn render(self) -> Result<String, ModelError> {
        match self {
            Table::Sizes => table4(),
            Table::Differences => table5(),
            Table::Capacities => table6(),
            Table::Breakeven => table7(),
            Table::Ratios => table8(),
        }
    }
}

const SIZE_HEADER: &str = "variant,N,F,N_BF,L_bytes,bits\n";

fn size_row(out: &mut String, variant: Variant, cfg: &ModelConfig) -> Result<(), ModelError> {
    let bits = model_sizes(cfg)?.bits(variant);
    let nbf = match variant {
        Variant::FibBf | Variant::FibCbf => cfg.filter_capacity().to_string(),
        _ => String::new(),
    };
    writeln!(
        out,
        "{variant},{},{},{nbf},{},{bits}",
        cfg.prefixes, cfg.faces, cfg.prefix_bytes
    )
    .expect("write to String");
    Ok(())
}

/// Sizes for N in {60, 50} with `N_BF = ceil(N/F)`, in the reference row
/// order.
pub fn table4() -> Result<String, ModelError> {
    let mut out = SIZE_HEADER.to_string();
    let rows = [
        (Variant::Fib, 60),
        (Variant::Fib, 50),
        (Variant::FibCbf, 50),
        (Variant::FibBf, 60),
        (Variant::FibBf, 50),
    ];
    for (variant, n) in rows {
        for f in FACES {
            size_row(
                &mut out,
                variant,
                &ModelConfig::new(n, f, PREFIX_BYTES, FPP),
            )?;
        }
    }
    Ok(out)
}

/// Size difference between N = 60 and N = 50.
pub fn table5() -> Result<String, ModelError> {
    let mut out = "variant,F,N_a,N_b,diff_bits\n".to_string();
    for variant in [Variant::Fib, Variant::FibBf] {
        for f in FACES {
            let a = ModelConfig::new(60, f, PREFIX_BYTES, FPP);
            let d = size_difference(&a, &a.with_prefixes(50), variant)?;
            writeln!(out, "{variant},{f},60,50,{d}").expect("write to String");
        }
    }
    Ok(out)
}

/// N = 50 with explicit filter capacities 25, 10 and 5.
pub fn table6() -> Result<String, ModelError> {
    let mut out = SIZE_HEADER.to_string();
    for f in FACES {
        size_row(
            &mut out,
            Variant::Fib,
            &ModelConfig::new(50, f, PREFIX_BYTES, FPP),
        )?;
    }
    for cap in [25, 10, 5] {
        for f in FACES {
            let cfg = ModelConfig::new(50, f, PREFIX_BYTES, FPP).with_capacity(cap);
            size_row(&mut out, Variant::FibBf, &cfg)?;
        }
    }
    Ok(out)
}

/// Break-even prefix lengths for N = 50.
pub fn table7() -> Result<String, ModelError> {
    let mut out = "variant,N,F,N_BF,breakeven_bytes\n".to_string();
    for (variant, cap) in [
        (Variant::FibCbf, 10),
        (Variant::FibCbf, 5),
        (Variant::FibBf, 10),
        (Variant::FibBf, 5),
    ] {
        for f in FACES {
            let l = breakeven_prefix_len(50, f, cap, FPP, variant == Variant::FibCbf)?;
            writeln!(out, "{variant},50,{f},{cap},{l}").expect("write to String");
        }
    }
    Ok(out)
}

/// FIB-BF / FIB size ratios for prefix lengths 4, 6, 8, 10.
pub fn table8() -> Result<String, ModelError> {
    let mut out = "variant,N,F,N_BF,L_bytes,ratio\n".to_string();
    for (n, f) in [(30, 10), (50, 15), (50, 10)] {
        for l in [4, 6, 8, 10] {
            let cfg = ModelConfig::new(n, f, l, FPP);
            let r = size_ratio(&cfg, Variant::FibBf)?;
            writeln!(out, "FIB-BF,{n},{f},{},{l},{r:.3}", cfg.filter_capacity())
                .expect("write to String");
        }
    }
    Ok(out)
}

/// Parameters of a free sweep over N and F.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub prefixes: Vec<u64>,
    pub faces: std::ops::RangeInclusive<u64>,
    /// `None` derives `ceil(N/F)`.
    pub capacity: Option<u64>,
    pub prefix_bytes: u64,
    pub fpp: f64,
    pub variants: Vec<Variant>,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            prefixes: vec![50, 60],
            faces: FACES,
            capacity: None,
            prefix_bytes: PREFIX_BYTES,
            fpp: FPP,
            variants: Variant::ALL.to_vec(),
        }
    }
}

pub fn sweep(s: &Sweep) -> Result<String, ModelError> {
    let mut out = SIZE_HEADER.to_string();
    for &variant in &s.variants {
        for &n in &s.prefixes {
            for f in s.faces.clone() {
                let mut cfg = ModelConfig::new(n, f, s.prefix_bytes, s.fpp);
                if let Some(cap) = s.capacity {
                    cfg = cfg.with_capacity(cap);
                }
                size_row(&mut out, variant, &cfg)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts() {
        let rows = |t: Table| t.render().unwrap().lines().count() - 1;
        assert_eq!(rows(Table::Sizes), 30);
        assert_eq!(rows(Table::Differences), 12);
        assert_eq!(rows(Table::Capacities), 24);
        assert_eq!(rows(Table::Breakeven), 24);
        assert_eq!(rows(Table::Ratios), 12);
        assert_eq!(Table::from_number(3), None);
    }

    #[test]
    fn sweep_covers_every_combination() {
        let s = Sweep {
            prefixes: vec![30],
            faces: 5..=6,
            capacity: Some(3),
            ..Sweep::default()
        };
        let csv = sweep(&s).unwrap();
        assert_eq!(csv.lines().count(), 1 + 4 * 2);
        assert!(csv.contains("FIB-BF,30,5,3,15,435\n"));
        assert!(csv.contains("FIB,30,6,,15,3780\n"));
    }
}
