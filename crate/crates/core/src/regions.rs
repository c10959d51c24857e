//! The closed set of 20 Italian region labels and their spelling variants.
//!
//! Labels are compared case-sensitively after trimming and collapsing runs
//! of internal whitespace. A fixed alias table maps the spelling variants
//! seen in the wild (missing hyphens, typographic apostrophes) onto the
//! canonical forms. Canonical order is the alphabetical order of the
//! canonical names and is used everywhere a deterministic tie-break is
//! needed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the 20 Italian regions. Variant order is canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    Abruzzo,
    Basilicata,
    Calabria,
    Campania,
    #[serde(rename = "Emilia-Romagna")]
    EmiliaRomagna,
    #[serde(rename = "Friuli-Venezia Giulia")]
    FriuliVeneziaGiulia,
    Lazio,
    Liguria,
    Lombardia,
    Marche,
    Molise,
    Piemonte,
    Puglia,
    Sardegna,
    Sicilia,
    Toscana,
    #[serde(rename = "Trentino-Alto Adige")]
    TrentinoAltoAdige,
    Umbria,
    #[serde(rename = "Valle d'Aosta")]
    ValleDAosta,
    Veneto,
}

impl Region {
    /// All regions in canonical order.
    pub const ALL: [Region; 20] = [
        Region::Abruzzo,
        Region::Basilicata,
        Region::Calabria,
        Region::Campania,
        Region::EmiliaRomagna,
        Region::FriuliVeneziaGiulia,
        Region::Lazio,
        Region::Liguria,
        Region::Lombardia,
        Region::Marche,
        Region::Molise,
        Region::Piemonte,
        Region::Puglia,
        Region::Sardegna,
        Region::Sicilia,
        Region::Toscana,
        Region::TrentinoAltoAdige,
        Region::Umbria,
        Region::ValleDAosta,
        Region::Veneto,
    ];

    /// Canonical spelling of the label.
    pub fn name(self) -> &'static str {
        match self {
            Region::Abruzzo => "Abruzzo",
            Region::Basilicata => "Basilicata",
            Region::Calabria => "Calabria",
            Region::Campania => "Campania",
            Region::EmiliaRomagna => "Emilia-Romagna",
            Region::FriuliVeneziaGiulia => "Friuli-Venezia Giulia",
            Region::Lazio => "Lazio",
            Region::Liguria => "Liguria",
            Region::Lombardia => "Lombardia",
            Region::Marche => "Marche",
            Region::Molise => "Molise",
            Region::Piemonte => "Piemonte",
            Region::Puglia => "Puglia",
            Region::Sardegna => "Sardegna",
            Region::Sicilia => "Sicilia",
            Region::Toscana => "Toscana",
            Region::TrentinoAltoAdige => "Trentino-Alto Adige",
            Region::Umbria => "Umbria",
            Region::ValleDAosta => "Valle d'Aosta",
            Region::Veneto => "Veneto",
        }
    }

    /// Resolve a raw label: trim, collapse internal whitespace runs, then
    /// match case-sensitively against the canonical names and the alias
    /// table. Returns `None` for anything outside the closed set.
    pub fn resolve(raw: &str) -> Option<Region> {
        let normalized = normalize_label(raw);
        Region::ALL
            .iter()
            .copied()
            .find(|r| r.name() == normalized)
            .or_else(|| alias_lookup(&normalized))
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = UnknownRegion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Region::resolve(s).ok_or_else(|| UnknownRegion(s.to_string()))
    }
}

/// Label that does not resolve to any of the 20 regions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown region label: {0:?}")]
pub struct UnknownRegion(pub String);

/// Trim and collapse runs of internal whitespace to a single space.
pub fn normalize_label(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Fixed spelling-variant table. Hyphen-less forms and typographic
/// apostrophes map to the canonical spellings; anything else is rejected.
fn alias_lookup(normalized: &str) -> Option<Region> {
    const ALIASES: &[(&str, Region)] = &[
        ("Emilia Romagna", Region::EmiliaRomagna),
        ("Friuli Venezia Giulia", Region::FriuliVeneziaGiulia),
        ("Friuli-Venezia-Giulia", Region::FriuliVeneziaGiulia),
        ("Trentino Alto Adige", Region::TrentinoAltoAdige),
        ("Trentino-Alto-Adige", Region::TrentinoAltoAdige),
        ("Valle d\u{2019}Aosta", Region::ValleDAosta),
        ("Valle D'Aosta", Region::ValleDAosta),
        ("Valle D\u{2019}Aosta", Region::ValleDAosta),
    ];
    ALIASES
        .iter()
        .find(|(alias, _)| *alias == normalized)
        .map(|&(_, region)| region)
}
