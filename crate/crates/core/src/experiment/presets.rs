//! Hard-coded parameter sets for the figure experiments.

use crate::coefficients::ZeroRule;
use crate::error::{Error, Result};

use super::config::{ExperimentConfig, Model, ProfileKind, SupportConfig};

/// A named figure: one or more tagged runs sharing an output bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub id: String,
    pub description: String,
    pub note: Option<String>,
    pub runs: Vec<(String, ExperimentConfig)>,
}

/// Identifiers accepted by [`preset`].
pub const FIGURE_IDS: &[&str] = &[
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3a", "fig3b",
    "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d", "fig5", "fig6a", "fig6b", "fig7", "fig8", "nb-su2",
    "nb-so4", "nb-su3",
];

fn base(model: Model, two_s: u32, l: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        model,
        two_s,
        l,
        seed,
        profile: ProfileKind::Equal,
        zero_count: ZeroRule::None,
        target_dimension: None,
        tolerance: None,
        trim: None,
        convergence_k: None,
        support: Vec::new(),
    }
}

fn spin_label(two_s: u32) -> String {
    if two_s % 2 == 0 {
        format!("{}", two_s / 2)
    } else {
        format!("{two_s}/2")
    }
}

fn su2_cantor(two_s: u32, seed: u64, profile: ProfileKind, zeros: ZeroRule, tol: f64, ks: (u32, u32)) -> Vec<(String, ExperimentConfig)> {
    [(2, 3, ks.0), (3, 5, ks.1)]
        .into_iter()
        .map(|(n, r, k)| {
            let mut c = base(Model::Su2, two_s, 200, seed);
            c.profile = profile;
            c.zero_count = zeros;
            c.tolerance = Some(tol);
            c.support.push(SupportConfig::cantor(n, r, k));
            if profile != ProfileKind::Equal {
                // Steps where the zeros would remove half the support or more are skipped.
                let steps = (1..=k / 4).map(|i| 4 * i).chain((k % 4 != 0).then_some(k));
                c.convergence_k = Some(steps.filter(|&j| 2 * zeros.count(j) < u64::from(n).pow(j)).collect());
            }
            (format!("N{n}r{r}"), c)
        })
        .collect()
}

fn su2_teepee(two_s: u32, seed: u64, profile: ProfileKind, zeros: ZeroRule) -> Vec<(String, ExperimentConfig)> {
    [(2, 3, 20), (3, 5, 18)]
        .into_iter()
        .map(|(n, r, k)| {
            let mut c = base(Model::Su2, two_s, 200, seed);
            c.profile = profile;
            c.zero_count = zeros;
            c.tolerance = Some(0.02);
            c.support.push(SupportConfig::teepee(n, r, k));
            (format!("N{n}r{r}"), c)
        })
        .collect()
}

fn su3_product(seed: u64, profile: ProfileKind) -> Vec<(String, ExperimentConfig)> {
    [((2, 3), (2, 3), 15), ((2, 3), (3, 5), 11)]
        .into_iter()
        .map(|((n1, r1), (n2, r2), k)| {
            let mut c = base(Model::Su3, 2, 100, seed);
            c.profile = profile;
            c.tolerance = Some(0.03);
            c.support = vec![SupportConfig::cantor(n1, r1, k), SupportConfig::cantor(n2, r2, k)];
            (format!("N{n1}r{r1}xN{n2}r{r2}"), c)
        })
        .collect()
}

fn su3_teepee(seed: u64, pair: usize) -> Vec<(String, ExperimentConfig)> {
    [(2, 3, 20), (3, 5, 18)]
        .into_iter()
        .map(|(n, r, k)| {
            let mut c = base(Model::Su3, 2, 150, seed);
            c.tolerance = Some(0.03);
            let mut support = vec![SupportConfig::point(0.0, 0.0), SupportConfig::point(0.0, 0.0)];
            support[pair] = SupportConfig::teepee(n, r, k);
            c.support = support;
            (format!("N{n}r{r}"), c)
        })
        .collect()
}

/// Preset runs for a figure id. `seed` feeds every random draw.
pub fn preset(id: &str, seed: u64) -> Result<Preset> {
    let spins = |letter: char| -> u32 {
        match letter {
            'a' => 1,
            'b' => 2,
            'c' => 3,
            _ => 4,
        }
    };
    let last = id.chars().last().unwrap_or(' ');
    let (description, note, runs) = match id {
        "fig1a" | "fig1b" | "fig1c" | "fig1d" => {
            let two_s = spins(last);
            (
                format!("s = {}, L = 200, equal coefficients on C[2,1/3;20] and C[3,1/5;20]", spin_label(two_s)),
                None,
                su2_cantor(two_s, seed, ProfileKind::Equal, ZeroRule::None, 0.03, (20, 20)),
            )
        }
        "fig2a" | "fig2b" => {
            let two_s = spins(last);
            (
                format!("s = {}, L = 200, equal coefficients on teepees C_tp[2,1/3;20] and C_tp[3,1/5;18]", spin_label(two_s)),
                None,
                su2_teepee(two_s, seed, ProfileKind::Equal, ZeroRule::None),
            )
        }
        "fig2c" | "fig2d" | "fig2e" | "fig2f" => {
            let (two_s, profile) = match last {
                'c' => (1, ProfileKind::TypeI),
                'd' => (1, ProfileKind::TypeII),
                'e' => (2, ProfileKind::TypeI),
                _ => (2, ProfileKind::TypeII),
            };
            (
                format!("s = {}, L = 200, {profile:?} coefficients with k^2 zeros on teepees", spin_label(two_s)),
                Some("teepee steps follow the caption (k = 20 and 18); the running text gives k = 20 for both".into()),
                su2_teepee(two_s, seed, profile, ZeroRule::K2),
            )
        }
        "fig3a" | "fig3b" | "fig3c" | "fig3d" | "fig4a" | "fig4b" | "fig4c" | "fig4d" => {
            let fig4 = id.starts_with("fig4");
            let two_s = match (fig4, last) {
                (false, 'a' | 'b') => 1,
                (false, _) => 2,
                (true, 'a' | 'b') => 3,
                (true, _) => 4,
            };
            let profile = if matches!(last, 'a' | 'c') { ProfileKind::TypeI } else { ProfileKind::TypeII };
            let tol = if two_s == 1 { 0.03 } else { 0.035 };
            (
                format!("s = {}, L = 200, {profile:?} coefficients with k^2 zeros on C[2,1/3;20] and C[3,1/5;18]", spin_label(two_s)),
                None,
                su2_cantor(two_s, seed, profile, ZeroRule::K2, tol, (20, 18)),
            )
        }
        "fig5" => (
            "SU(3), L = 100, equal coefficients on C[2,1/3;15]xC[2,1/3;15] and C[2,1/3;11]xC[3,1/5;11]".into(),
            None,
            su3_product(seed, ProfileKind::Equal),
        ),
        "fig6a" | "fig6b" => {
            let profile = if last == 'a' { ProfileKind::TypeI } else { ProfileKind::TypeII };
            (format!("SU(3), L = 100, {profile:?} coefficients on product Cantor sets"), None, su3_product(seed, profile))
        }
        "fig7" | "fig8" => {
            let pair = usize::from(id == "fig8");
            (
                format!("SU(3), L = 150, Cantor teepee on angular pair {}", pair + 1),
                Some("steps follow the caption (k = 20 for N = 2, k = 18 for N = 3); the running text swaps them".into()),
                su3_teepee(seed, pair),
            )
        }
        "nb-su2" => {
            let mut c = base(Model::Su2, 1, 200, seed);
            c.support.push(SupportConfig::basis(vec![100]));
            c.target_dimension = Some(1.0);
            c.tolerance = Some(0.02);
            ("|L, L/2> for spin-1/2, L = 200; d_f reports 2 x slope = N_B".into(), None, vec![("basis".into(), c)])
        }
        "nb-so4" => {
            let mut c = base(Model::So4, 1, 200, seed);
            c.support = vec![SupportConfig::basis(vec![100]), SupportConfig::basis(vec![100])];
            c.target_dimension = Some(2.0);
            c.tolerance = Some(0.02);
            ("SO(4) |L, L/2, L/2>, L = 200; d_f reports 2 x slope = N_B".into(), None, vec![("basis".into(), c)])
        }
        "nb-su3" => {
            let mut c = base(Model::Su3, 2, 99, seed);
            c.support = vec![SupportConfig::basis(vec![33, 33])];
            c.target_dimension = Some(2.0);
            c.tolerance = Some(0.02);
            ("SU(3) |L, L/3, L/3>, L = 99; d_f reports 2 x slope = N_B".into(), None, vec![("basis".into(), c)])
        }
        _ => {
            return Err(Error::Config(format!("unknown figure id '{id}'; known ids: {}", FIGURE_IDS.join(", "))));
        }
    };
    Ok(Preset { id: id.to_string(), description, note, runs })
}
