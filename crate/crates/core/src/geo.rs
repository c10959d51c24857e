//! Spatial primitives: polygon sets loaded from GeoJSON, point-in-area
//! assignment, gold-coordinate centroids, and the per-area error/density
//! aggregations behind the choropleth artifacts.
//!
//! Containment uses the even-odd rule on plate-carrée coordinates (lat as
//! y, lon as x), which also makes holes work without tracking ring roles.
//! Points on shared boundaries resolve to the first containing area in
//! canonical name order; points outside every polygon land in an explicit
//! "unassigned" bucket unless centroid snapping is requested.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::Value;

use crate::encoding::Prediction;
use crate::ingest::Record;
use crate::metrics::{compensated_sum, haversine_km, MetricsError};
use crate::regions::Region;

/// Name used for the out-of-every-polygon bucket in CSV output.
pub const UNASSIGNED_LABEL: &str = "(unassigned)";

/// A named area with its rings and centroid. Rings are closed (first
/// vertex repeated last) lat-lon vertex lists; containment is even-odd
/// across all rings, so interior rings act as holes.
#[derive(Debug, Clone)]
pub struct AreaGeometry {
    pub name: String,
    pub rings: Vec<Vec<(f64, f64)>>,
    pub centroid: (f64, f64),
}

impl AreaGeometry {
    /// Build from rings, validating shape and computing the centroid as
    /// the arithmetic mean of ring vertices (closing duplicates excluded).
    pub fn new(name: impl Into<String>, rings: Vec<Vec<(f64, f64)>>) -> Result<Self, GeoError> {
        let name = name.into();
        if rings.is_empty() {
            return Err(GeoError::BadGeometry { name, reason: "no rings".into() });
        }
        for ring in &rings {
            if ring.len() < 4 {
                return Err(GeoError::BadGeometry {
                    name,
                    reason: format!("ring with {} vertices, need at least 4", ring.len()),
                });
            }
            if ring.first() != ring.last() {
                return Err(GeoError::BadGeometry {
                    name,
                    reason: "ring not closed (first vertex must equal last)".into(),
                });
            }
        }
        let mut lat_sum = 0.0;
        let mut lon_sum = 0.0;
        let mut n = 0usize;
        for ring in &rings {
            for &(lat, lon) in &ring[..ring.len() - 1] {
                lat_sum += lat;
                lon_sum += lon;
                n += 1;
            }
        }
        let centroid = (lat_sum / n as f64, lon_sum / n as f64);
        Ok(AreaGeometry { name, rings, centroid })
    }

    /// Even-odd containment test over all rings.
    pub fn contains(&self, point: (f64, f64)) -> bool {
        let (py, px) = point;
        let mut inside = false;
        for ring in &self.rings {
            for edge in ring.windows(2) {
                let (y1, x1) = edge[0];
                let (y2, x2) = edge[1];
                if (y1 > py) != (y2 > py) {
                    let x_cross = (x2 - x1) * (py - y1) / (y2 - y1) + x1;
                    if px < x_cross {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    /// Naive pairwise self-intersection check, used at load time to warn
    /// about malformed rings. Skipped for very large rings to keep loading
    /// of detailed real-world boundary files linear.
    fn self_intersects(&self) -> bool {
        const MAX_CHECKED_VERTICES: usize = 2000;
        for ring in &self.rings {
            let n = ring.len() - 1; // edges
            if n > MAX_CHECKED_VERTICES {
                continue;
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    // Skip adjacent edges (they share an endpoint).
                    if j == i + 1 || (i == 0 && j == n - 1) {
                        continue;
                    }
                    if segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1]) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    fn orient(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
        (q.1 - p.1) * (r.0 - p.0) - (q.0 - p.0) * (r.1 - p.1)
    }
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[derive(Debug, thiserror::Error)]
pub enum GeoError {
    #[error("empty geometry set")]
    EmptyGeometry,
    #[error("invalid geometry for {name:?}: {reason}")]
    BadGeometry { name: String, reason: String },
    #[error("feature {index} has no string property {key:?}")]
    MissingName { index: usize, key: String },
    #[error("duplicate area name {name:?}")]
    DuplicateAreaName { name: String },
    #[error("not a GeoJSON FeatureCollection")]
    NotAFeatureCollection,
    #[error("feature {name:?} has unsupported geometry type {geometry_type:?}")]
    UnsupportedGeometry { name: String, geometry_type: String },
    #[error("no records for region {region}")]
    NoRecordsForRegion { region: Region },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("invalid GeoJSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Result of loading a GeoJSON file: areas sorted by canonical name order
/// plus validation warnings (non-fatal issues such as self-intersections).
#[derive(Debug)]
pub struct GeometrySet {
    pub areas: Vec<AreaGeometry>,
    pub warnings: Vec<String>,
}

/// Load a FeatureCollection of Polygon/MultiPolygon features. `name_key`
/// selects the property carrying the area name (commonly "name").
/// GeoJSON stores lon-lat pairs; they are converted to lat-lon here.
pub fn load_geojson(doc: &Value, name_key: &str) -> Result<GeometrySet, GeoError> {
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or(GeoError::NotAFeatureCollection)?;

    let mut areas = Vec::with_capacity(features.len());
    let mut warnings = Vec::new();
    let mut seen = std::collections::BTreeSet::new();

    for (index, feature) in features.iter().enumerate() {
        let name = feature
            .pointer(&format!("/properties/{name_key}"))
            .and_then(Value::as_str)
            .ok_or_else(|| GeoError::MissingName { index, key: name_key.to_string() })?
            .to_string();
        if !seen.insert(name.clone()) {
            return Err(GeoError::DuplicateAreaName { name });
        }
        let geometry = feature.get("geometry").unwrap_or(&Value::Null);
        let geometry_type = geometry.get("type").and_then(Value::as_str).unwrap_or("");
        let coords = geometry.get("coordinates").unwrap_or(&Value::Null);

        let rings = match geometry_type {
            "Polygon" => polygon_rings(coords, &name)?,
            "MultiPolygon" => {
                let mut rings = Vec::new();
                for polygon in coords.as_array().into_iter().flatten() {
                    rings.extend(polygon_rings(polygon, &name)?);
                }
                rings
            }
            other => {
                return Err(GeoError::UnsupportedGeometry {
                    name,
                    geometry_type: other.to_string(),
                })
            }
        };
        let area = AreaGeometry::new(name, rings)?;
        if area.self_intersects() {
            warnings.push(format!("area {:?} has a self-intersecting ring", area.name));
        }
        areas.push(area);
    }

    areas.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(GeometrySet { areas, warnings })
}

/// One GeoJSON polygon: an array of rings, each an array of [lon, lat].
fn polygon_rings(coords: &Value, name: &str) -> Result<Vec<Vec<(f64, f64)>>, GeoError> {
    let bad = |reason: &str| GeoError::BadGeometry {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let mut rings = Vec::new();
    for ring in coords.as_array().ok_or_else(|| bad("coordinates not an array"))? {
        let mut vertices = Vec::new();
        for position in ring.as_array().ok_or_else(|| bad("ring not an array"))? {
            let pair = position.as_array().ok_or_else(|| bad("position not an array"))?;
            let lon = pair.first().and_then(Value::as_f64).ok_or_else(|| bad("bad longitude"))?;
            let lat = pair.get(1).and_then(Value::as_f64).ok_or_else(|| bad("bad latitude"))?;
            vertices.push((lat, lon));
        }
        rings.push(vertices);
    }
    Ok(rings)
}

/// Find the area containing a point, scanning all areas and returning the
/// first match in canonical name order. `None` means offshore / outside
/// every polygon.
pub fn locate_area(
    point: (f64, f64),
    areas: &[AreaGeometry],
) -> Result<Option<&str>, GeoError> {
    if areas.is_empty() {
        return Err(GeoError::EmptyGeometry);
    }
    Ok(areas
        .iter()
        .filter(|a| a.contains(point))
        .map(|a| a.name.as_str())
        .min())
}

/// What to do with points outside every polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignPolicy {
    /// Report them under the unassigned bucket (default: silent snapping
    /// hides data issues).
    #[default]
    Unassigned,
    /// Snap to the area with the nearest centroid.
    SnapNearestCentroid,
}

fn assign(
    point: (f64, f64),
    areas: &[AreaGeometry],
    policy: AssignPolicy,
) -> Result<Option<&str>, GeoError> {
    if let Some(name) = locate_area(point, areas)? {
        return Ok(Some(name));
    }
    match policy {
        AssignPolicy::Unassigned => Ok(None),
        AssignPolicy::SnapNearestCentroid => {
            let mut best: Option<(&str, f64)> = None;
            for area in areas {
                let d = haversine_km(point, area.centroid)?;
                let better = match best {
                    None => true,
                    Some((_, best_d)) => d < best_d,
                };
                if better {
                    best = Some((area.name.as_str(), d));
                }
            }
            Ok(best.map(|(name, _)| name))
        }
    }
}

/// Arithmetic mean (in degree space) of the gold coordinates of a region's
/// records.
pub fn gold_region_centroid(records: &[Record], region: Region) -> Result<(f64, f64), GeoError> {
    let mut lat_sum = 0.0;
    let mut lon_sum = 0.0;
    let mut n = 0usize;
    for r in records.iter().filter(|r| r.region == region) {
        lat_sum += r.lat;
        lon_sum += r.lon;
        n += 1;
    }
    if n == 0 {
        return Err(GeoError::NoRecordsForRegion { region });
    }
    Ok((lat_sum / n as f64, lon_sum / n as f64))
}

/// Sum, mean, and count of distance error for one area.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct AreaStats {
    pub sum_km: f64,
    pub mean_km: f64,
    pub count: usize,
}

/// Per-area aggregation of prediction error, keyed by area name. Samples
/// are assigned by their gold coordinates; the unassigned bucket keeps the
/// totals reconcilable with the global average error.
#[derive(Debug, Clone)]
pub struct AreaErrorMap {
    pub per_area: BTreeMap<String, AreaStats>,
    pub unassigned: AreaStats,
}

impl AreaErrorMap {
    /// CSV rows `area,sum_km,mean_km,count`, unassigned bucket last.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("area,sum_km,mean_km,count\n");
        for (name, stats) in &self.per_area {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(name),
                stats.sum_km,
                stats.mean_km,
                stats.count
            );
        }
        let _ = writeln!(
            out,
            "{},{},{},{}",
            UNASSIGNED_LABEL, self.unassigned.sum_km, self.unassigned.mean_km, self.unassigned.count
        );
        out
    }
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn stats_from_distances(distances: &[f64]) -> AreaStats {
    let sum_km = compensated_sum(distances.iter().copied());
    let count = distances.len();
    let mean_km = if count == 0 { 0.0 } else { sum_km / count as f64 };
    AreaStats { sum_km, mean_km, count }
}

/// Aggregate haversine errors per area. Every area appears in the output,
/// zero-filled when nothing landed in it.
pub fn area_error_map(
    preds: &[Prediction],
    golds: &[Record],
    areas: &[AreaGeometry],
    policy: AssignPolicy,
) -> Result<AreaErrorMap, GeoError> {
    if preds.len() != golds.len() {
        return Err(MetricsError::LengthMismatch { preds: preds.len(), golds: golds.len() }.into());
    }
    if areas.is_empty() {
        return Err(GeoError::EmptyGeometry);
    }
    let mut buckets: BTreeMap<&str, Vec<f64>> =
        areas.iter().map(|a| (a.name.as_str(), Vec::new())).collect();
    let mut unassigned = Vec::new();

    for (p, g) in preds.iter().zip(golds) {
        let distance = haversine_km((p.lat, p.lon), (g.lat, g.lon))?;
        match assign((g.lat, g.lon), areas, policy)? {
            Some(name) => buckets.get_mut(name).expect("bucket preseeded").push(distance),
            None => unassigned.push(distance),
        }
    }

    Ok(AreaErrorMap {
        per_area: buckets
            .into_iter()
            .map(|(name, distances)| (name.to_string(), stats_from_distances(&distances)))
            .collect(),
        unassigned: stats_from_distances(&unassigned),
    })
}

/// Per-area sample counts (the post-density aggregation).
#[derive(Debug, Clone)]
pub struct DensityMap {
    pub per_area: BTreeMap<String, usize>,
    pub unassigned: usize,
}

impl DensityMap {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("area,count\n");
        for (name, count) in &self.per_area {
            let _ = writeln!(out, "{},{}", csv_field(name), count);
        }
        let _ = writeln!(out, "{},{}", UNASSIGNED_LABEL, self.unassigned);
        out
    }
}

/// Count records per area by gold coordinates.
pub fn density_map(
    records: &[Record],
    areas: &[AreaGeometry],
    policy: AssignPolicy,
) -> Result<DensityMap, GeoError> {
    if areas.is_empty() {
        return Err(GeoError::EmptyGeometry);
    }
    let mut per_area: BTreeMap<String, usize> =
        areas.iter().map(|a| (a.name.clone(), 0)).collect();
    let mut unassigned = 0;
    for r in records {
        match assign((r.lat, r.lon), areas, policy)? {
            Some(name) => *per_area.get_mut(name).expect("bucket preseeded") += 1,
            None => unassigned += 1,
        }
    }
    Ok(DensityMap { per_area, unassigned })
}

/// Clone a GeoJSON document, annotating each feature's properties with the
/// aggregated `sum_km` / `mean_km` / `count` so the file is ready for
/// choropleth rendering.
pub fn annotate_geojson(
    doc: &Value,
    name_key: &str,
    map: &AreaErrorMap,
) -> Result<Value, GeoError> {
    let mut out = doc.clone();
    let features = out
        .get_mut("features")
        .and_then(Value::as_array_mut)
        .ok_or(GeoError::NotAFeatureCollection)?;
    for (index, feature) in features.iter_mut().enumerate() {
        let name = feature
            .pointer(&format!("/properties/{name_key}"))
            .and_then(Value::as_str)
            .ok_or_else(|| GeoError::MissingName { index, key: name_key.to_string() })?
            .to_string();
        let stats = map.per_area.get(&name).copied().unwrap_or_default();
        let properties = feature
            .get_mut("properties")
            .and_then(Value::as_object_mut)
            .expect("checked above");
        properties.insert("sum_km".into(), serde_json::json!(stats.sum_km));
        properties.insert("mean_km".into(), serde_json::json!(stats.mean_km));
        properties.insert("count".into(), serde_json::json!(stats.count));
    }
    Ok(out)
}

/// Like [`annotate_geojson`] but for density counts only.
pub fn annotate_geojson_counts(
    doc: &Value,
    name_key: &str,
    map: &DensityMap,
) -> Result<Value, GeoError> {
    let mut out = doc.clone();
    let features = out
        .get_mut("features")
        .and_then(Value::as_array_mut)
        .ok_or(GeoError::NotAFeatureCollection)?;
    for (index, feature) in features.iter_mut().enumerate() {
        let name = feature
            .pointer(&format!("/properties/{name_key}"))
            .and_then(Value::as_str)
            .ok_or_else(|| GeoError::MissingName { index, key: name_key.to_string() })?
            .to_string();
        let count = map.per_area.get(&name).copied().unwrap_or(0);
        let properties = feature
            .get_mut("properties")
            .and_then(Value::as_object_mut)
            .expect("checked above");
        properties.insert("count".into(), serde_json::json!(count));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::ParseStatus;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn square(name: &str, lat0: f64, lon0: f64, size: f64) -> AreaGeometry {
        AreaGeometry::new(
            name,
            vec![vec![
                (lat0, lon0),
                (lat0, lon0 + size),
                (lat0 + size, lon0 + size),
                (lat0 + size, lon0),
                (lat0, lon0),
            ]],
        )
        .unwrap()
    }

    /// Independent oracle: winding number per ring, combined with XOR so
    /// holes behave like the even-odd rule.
    fn winding_contains(area: &AreaGeometry, point: (f64, f64)) -> bool {
        let (py, px) = point;
        let mut inside = false;
        for ring in &area.rings {
            let mut winding = 0i32;
            for edge in ring.windows(2) {
                let (y1, x1) = edge[0];
                let (y2, x2) = edge[1];
                let is_left = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1);
                if y1 <= py {
                    if y2 > py && is_left > 0.0 {
                        winding += 1;
                    }
                } else if y2 <= py && is_left < 0.0 {
                    winding -= 1;
                }
            }
            if winding != 0 {
                inside = !inside;
            }
        }
        inside
    }

    fn fixture_areas() -> Vec<AreaGeometry> {
        let mut areas = vec![
            square("alpha", 0.0, 0.0, 1.0),
            square("beta", 0.0, 2.0, 1.0),
            // gamma has a hole in the middle.
            AreaGeometry::new(
                "gamma",
                vec![
                    vec![(10.0, 10.0), (10.0, 20.0), (20.0, 20.0), (20.0, 10.0), (10.0, 10.0)],
                    vec![(14.0, 14.0), (14.0, 16.0), (16.0, 16.0), (16.0, 14.0), (14.0, 14.0)],
                ],
            )
            .unwrap(),
            // delta is a multipolygon: two disjoint squares.
            AreaGeometry::new(
                "delta",
                vec![
                    vec![(30.0, 30.0), (30.0, 31.0), (31.0, 31.0), (31.0, 30.0), (30.0, 30.0)],
                    vec![(33.0, 33.0), (33.0, 34.0), (34.0, 34.0), (34.0, 33.0), (33.0, 33.0)],
                ],
            )
            .unwrap(),
            // epsilon is a triangle, not axis-aligned.
            AreaGeometry::new(
                "epsilon",
                vec![vec![(40.0, 40.0), (44.0, 40.0), (42.0, 45.0), (40.0, 40.0)]],
            )
            .unwrap(),
        ];
        areas.sort_by(|a, b| a.name.cmp(&b.name));
        areas
    }

    #[test]
    fn unit_square_contains_center() {
        let areas = fixture_areas();
        assert_eq!(locate_area((0.5, 0.5), &areas).unwrap(), Some("alpha"));
        assert_eq!(locate_area((0.5, 2.5), &areas).unwrap(), Some("beta"));
        assert_eq!(locate_area((50.0, 50.0), &areas).unwrap(), None);
    }

    #[test]
    fn hole_is_outside() {
        let areas = fixture_areas();
        assert_eq!(locate_area((12.0, 12.0), &areas).unwrap(), Some("gamma"));
        assert_eq!(locate_area((15.0, 15.0), &areas).unwrap(), None, "inside the hole");
    }

    #[test]
    fn multipolygon_parts_both_match() {
        let areas = fixture_areas();
        assert_eq!(locate_area((30.5, 30.5), &areas).unwrap(), Some("delta"));
        assert_eq!(locate_area((33.5, 33.5), &areas).unwrap(), Some("delta"));
        assert_eq!(locate_area((32.0, 32.0), &areas).unwrap(), None, "gap between parts");
    }

    #[test]
    fn empty_geometry_set_is_an_error() {
        assert!(matches!(locate_area((0.0, 0.0), &[]), Err(GeoError::EmptyGeometry)));
    }

    #[test]
    fn boundary_points_resolve_deterministically() {
        // Two squares sharing the edge lon = 1.
        let areas =
            vec![square("east", 0.0, 1.0, 1.0), square("west", 0.0, 0.0, 1.0)];
        let on_edge = (0.5, 1.0);
        let first = locate_area(on_edge, &areas).unwrap();
        for _ in 0..10 {
            assert_eq!(locate_area(on_edge, &areas).unwrap(), first);
        }
        // The shared edge belongs to exactly one square under the
        // half-open crossing rule, and name order breaks any overlap.
        assert_eq!(first, Some("east"));
    }

    #[test]
    fn locate_agrees_with_winding_oracle_on_random_points() {
        let areas = fixture_areas();
        let mut rng = StdRng::seed_from_u64(12345);
        for _ in 0..10_000 {
            let point = (rng.gen_range(-2.0..50.0), rng.gen_range(-2.0..50.0));
            let expected = areas
                .iter()
                .filter(|a| winding_contains(a, point))
                .map(|a| a.name.as_str())
                .min();
            assert_eq!(locate_area(point, &areas).unwrap(), expected, "at {point:?}");
        }
    }

    #[test]
    fn centroid_of_records() {
        let rec = |id: &str, lat: f64, lon: f64| {
            Record::new(id, "t", Region::Campania, lat, lon).unwrap()
        };
        let single = vec![rec("1", 40.0, 14.0)];
        assert_eq!(gold_region_centroid(&single, Region::Campania).unwrap(), (40.0, 14.0));

        let two = vec![rec("1", 40.0, 14.0), rec("2", 42.0, 12.0)];
        assert_eq!(gold_region_centroid(&two, Region::Campania).unwrap(), (41.0, 13.0));

        assert!(matches!(
            gold_region_centroid(&two, Region::Lazio),
            Err(GeoError::NoRecordsForRegion { region: Region::Lazio })
        ));
    }

    #[test]
    fn centroid_lies_in_bounding_box() {
        let mut rng = StdRng::seed_from_u64(8);
        let records: Vec<Record> = (0..200)
            .map(|i| {
                Record::new(
                    format!("{i}"),
                    "t",
                    Region::Sicilia,
                    rng.gen_range(36.5..38.5),
                    rng.gen_range(12.0..15.5),
                )
                .unwrap()
            })
            .collect();
        let (lat, lon) = gold_region_centroid(&records, Region::Sicilia).unwrap();
        let lat_bounds = records.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| {
            (lo.min(r.lat), hi.max(r.lat))
        });
        let lon_bounds = records.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| {
            (lo.min(r.lon), hi.max(r.lon))
        });
        assert!(lat >= lat_bounds.0 && lat <= lat_bounds.1);
        assert!(lon >= lon_bounds.0 && lon <= lon_bounds.1);
    }

    fn pred_at(lat: f64, lon: f64) -> Prediction {
        Prediction {
            region: Region::Lazio,
            lat,
            lon,
            parse_status: ParseStatus::Clean,
            raw: String::new(),
        }
    }

    fn gold_at(id: usize, lat: f64, lon: f64) -> Record {
        Record::new(format!("{id}"), "t", Region::Lazio, lat, lon).unwrap()
    }

    #[test]
    fn exact_predictions_give_zero_error_map() {
        let areas = fixture_areas();
        let golds = vec![gold_at(0, 0.5, 0.5), gold_at(1, 0.5, 2.5)];
        let preds = vec![pred_at(0.5, 0.5), pred_at(0.5, 2.5)];
        let map = area_error_map(&preds, &golds, &areas, AssignPolicy::Unassigned).unwrap();
        for stats in map.per_area.values() {
            assert_eq!(stats.sum_km, 0.0);
            assert_eq!(stats.mean_km, 0.0);
        }
        assert_eq!(map.per_area["alpha"].count, 1);
        assert_eq!(map.per_area["beta"].count, 1);
        assert_eq!(map.unassigned.count, 0);
    }

    #[test]
    fn sum_and_mean_per_area() {
        let areas = fixture_areas();
        // Both gold points in alpha; predictions 10 km and 30 km east.
        let deg_10km = (10.0 / crate::metrics::EARTH_RADIUS_KM).to_degrees();
        let deg_30km = (30.0 / crate::metrics::EARTH_RADIUS_KM).to_degrees();
        let golds = vec![gold_at(0, 0.0, 0.5), gold_at(1, 0.0, 0.6)];
        let preds = vec![pred_at(0.0, 0.5 + deg_10km), pred_at(0.0, 0.6 + deg_30km)];
        let map = area_error_map(&preds, &golds, &areas, AssignPolicy::Unassigned).unwrap();
        let alpha = map.per_area["alpha"];
        assert_eq!(alpha.count, 2);
        assert!((alpha.sum_km - 40.0).abs() < 1e-9);
        assert!((alpha.mean_km - 20.0).abs() < 1e-9);
    }

    #[test]
    fn five_area_fixture_matches_hand_assignments() {
        let areas = fixture_areas();
        let samples = [
            ((0.5, 0.5), "alpha"),
            ((0.9, 0.1), "alpha"),
            ((0.5, 2.5), "beta"),
            ((11.0, 19.0), "gamma"),
            ((30.2, 30.8), "delta"),
            ((33.9, 33.1), "delta"),
            ((41.0, 41.0), "epsilon"),
        ];
        let golds: Vec<Record> =
            samples.iter().enumerate().map(|(i, &((lat, lon), _))| gold_at(i, lat, lon)).collect();
        let preds: Vec<Prediction> =
            samples.iter().map(|&((lat, lon), _)| pred_at(lat, lon)).collect();
        let map = area_error_map(&preds, &golds, &areas, AssignPolicy::Unassigned).unwrap();
        let mut expected: BTreeMap<&str, usize> = BTreeMap::new();
        for (_, area) in samples {
            *expected.entry(area).or_default() += 1;
        }
        for (name, stats) in &map.per_area {
            assert_eq!(stats.count, expected.get(name.as_str()).copied().unwrap_or(0), "{name}");
        }
        assert_eq!(map.unassigned.count, 0);

        let density = density_map(&golds, &areas, AssignPolicy::Unassigned).unwrap();
        for (name, count) in &density.per_area {
            assert_eq!(*count, expected.get(name.as_str()).copied().unwrap_or(0));
        }
    }

    #[test]
    fn offshore_points_collect_in_unassigned_bucket() {
        let areas = fixture_areas();
        let golds = vec![gold_at(0, -1.5, -1.5)];
        let preds = vec![pred_at(0.5, 0.5)];
        let map = area_error_map(&preds, &golds, &areas, AssignPolicy::Unassigned).unwrap();
        assert_eq!(map.unassigned.count, 1);
        assert!(map.unassigned.sum_km > 0.0);

        // With snapping the same point lands in the nearest-centroid area.
        let snapped =
            area_error_map(&preds, &golds, &areas, AssignPolicy::SnapNearestCentroid).unwrap();
        assert_eq!(snapped.unassigned.count, 0);
        assert_eq!(snapped.per_area["alpha"].count, 1);
    }

    #[test]
    fn error_map_totals_reconcile_with_global_mean() {
        let areas = fixture_areas();
        let mut rng = StdRng::seed_from_u64(21);
        let n = 500;
        let golds: Vec<Record> = (0..n)
            .map(|i| gold_at(i, rng.gen_range(-2.0..50.0), rng.gen_range(-2.0..50.0)))
            .collect();
        let preds: Vec<Prediction> = (0..n)
            .map(|_| pred_at(rng.gen_range(-2.0..50.0), rng.gen_range(-2.0..50.0)))
            .collect();
        let map = area_error_map(&preds, &golds, &areas, AssignPolicy::Unassigned).unwrap();
        let avg = crate::metrics::avg_distance_error(&preds, &golds).unwrap();
        let total: f64 = map.per_area.values().map(|s| s.sum_km).sum::<f64>()
            + map.unassigned.sum_km;
        assert!((total - n as f64 * avg).abs() < 1e-6, "{total} vs {}", n as f64 * avg);

        let density = density_map(&golds, &areas, AssignPolicy::Unassigned).unwrap();
        let assigned: usize = density.per_area.values().sum();
        assert_eq!(assigned + density.unassigned, n);
    }

    #[test]
    fn empty_records_give_all_zero_density() {
        let areas = fixture_areas();
        let density = density_map(&[], &areas, AssignPolicy::Unassigned).unwrap();
        assert_eq!(density.per_area.len(), areas.len());
        assert!(density.per_area.values().all(|&c| c == 0));
        assert_eq!(density.unassigned, 0);
    }

    #[test]
    fn loads_geojson_fixture() {
        let raw = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/geometry/synthetic_areas.geojson"
        ))
        .unwrap();
        let doc: Value = serde_json::from_str(&raw).unwrap();
        let set = load_geojson(&doc, "name").unwrap();
        assert_eq!(set.areas.len(), 5);
        assert!(set.warnings.is_empty());
        let names: Vec<&str> = set.areas.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["alpha", "beta", "delta", "epsilon", "gamma"]);
        // lon-lat in the file becomes lat-lon here: alpha spans 0..1 in both.
        assert_eq!(locate_area((0.5, 0.5), &set.areas).unwrap(), Some("alpha"));
        assert_eq!(locate_area((15.0, 15.0), &set.areas).unwrap(), None, "gamma's hole");
    }

    /// Runs only when real Italian region boundaries are available as
    /// `$GEOBENCH_GEOMETRY_DIR/regions.geojson` (the repo ships only
    /// synthetic fixtures).
    #[test]
    fn official_region_geometry_when_available() {
        let Some(dir) = std::env::var_os("GEOBENCH_GEOMETRY_DIR") else {
            eprintln!("GEOBENCH_GEOMETRY_DIR not set; skipping real-boundary check");
            return;
        };
        let path = std::path::PathBuf::from(dir).join("regions.geojson");
        if !path.exists() {
            eprintln!("{} not present; skipping real-boundary check", path.display());
            return;
        }
        let raw = std::fs::read_to_string(&path).unwrap();
        let doc: Value = serde_json::from_str(&raw).unwrap();
        let set = load_geojson(&doc, "name").unwrap();
        assert_eq!(set.areas.len(), 20);
        // Gold point of the Torino-area sample row.
        assert_eq!(locate_area((45.0729, 7.6758), &set.areas).unwrap(), Some("Piemonte"));
    }

    #[test]
    fn rejects_malformed_geometry() {
        let unclosed: Value = serde_json::json!({
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "properties": {"name": "bad"},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]]
                }
            }]
        });
        assert!(matches!(
            load_geojson(&unclosed, "name"),
            Err(GeoError::BadGeometry { .. })
        ));

        let unnamed: Value = serde_json::json!({
            "type": "FeatureCollection",
            "features": [{"type": "Feature", "properties": {}, "geometry": null}]
        });
        assert!(matches!(load_geojson(&unnamed, "name"), Err(GeoError::MissingName { .. })));
    }

    #[test]
    fn warns_on_self_intersection() {
        // A bowtie: edges cross in the middle.
        let bowtie: Value = serde_json::json!({
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "properties": {"name": "bowtie"},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]]
                }
            }]
        });
        let set = load_geojson(&bowtie, "name").unwrap();
        assert_eq!(set.warnings.len(), 1);
        assert!(set.warnings[0].contains("self-intersecting"));
    }

    #[test]
    fn annotates_features_for_choropleth() {
        let doc: Value = serde_json::json!({
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "properties": {"name": "alpha"},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]]
                }
            }]
        });
        let mut map = AreaErrorMap {
            per_area: BTreeMap::new(),
            unassigned: AreaStats::default(),
        };
        map.per_area.insert(
            "alpha".into(),
            AreaStats { sum_km: 40.0, mean_km: 20.0, count: 2 },
        );
        let annotated = annotate_geojson(&doc, "name", &map).unwrap();
        let props = &annotated["features"][0]["properties"];
        assert_eq!(props["sum_km"], serde_json::json!(40.0));
        assert_eq!(props["mean_km"], serde_json::json!(20.0));
        assert_eq!(props["count"], serde_json::json!(2));
    }

    #[test]
    fn csv_output_shapes() {
        let map = AreaErrorMap {
            per_area: BTreeMap::from([(
                "alpha".to_string(),
                AreaStats { sum_km: 40.0, mean_km: 20.0, count: 2 },
            )]),
            unassigned: AreaStats { sum_km: 5.0, mean_km: 5.0, count: 1 },
        };
        let csv = map.to_csv();
        assert_eq!(csv, "area,sum_km,mean_km,count\nalpha,40,20,2\n(unassigned),5,5,1\n");
    }
}
