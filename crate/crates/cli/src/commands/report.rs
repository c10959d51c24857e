use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use geobench_core::geo::{annotate_geojson_counts, density_map, AssignPolicy};
use geobench_core::ingest::compute_stats;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_geometry, load_geometry_doc, load_merged_records, parse_options, write_atomic};

use super::resolve_geometry;

#[derive(Args)]
pub struct ReportArgs {
    /// Merged TSV (id, text, region, lat, lon)
    #[arg(long, value_name = "FILE")]
    pub merged: PathBuf,

    /// Output directory for the dataset artifacts
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Region/province GeoJSON for the density map
    #[arg(long, value_name = "FILE")]
    pub geometry: Option<PathBuf>,

    /// Property carrying the area name in the GeoJSON
    #[arg(long, value_name = "KEY")]
    pub geometry_name_key: Option<String>,

    /// Snap points outside every polygon to the nearest centroid
    #[arg(long)]
    pub snap_nearest_centroid: bool,

    /// Also render bar chart / choropleth SVGs
    #[arg(long)]
    pub svg: bool,

    /// Skip one header line in the input
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

pub fn run(args: &ReportArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let records = load_merged_records(&args.merged, &opts)?;

    let stats = compute_stats(&records)?;
    let ordered = stats.by_descending_count();
    let mut csv = String::from("region,count,fraction\n");
    for (region, share) in &ordered {
        let _ = writeln!(csv, "{},{},{}", region, share.count, share.fraction);
    }
    write_atomic(&args.out_dir.join("label_distribution.csv"), csv.as_bytes())?;
    if args.svg {
        let bars: Vec<(String, f64)> = ordered
            .iter()
            .filter(|(_, s)| s.count > 0)
            .map(|(r, s)| (r.to_string(), s.count as f64))
            .collect();
        write_atomic(
            &args.out_dir.join("label_distribution.svg"),
            crate::svg::bar_chart("posts per region", &bars).as_bytes(),
        )?;
    }

    match resolve_geometry(args.geometry.as_deref(), config, "regions.geojson") {
        Some(path) => {
            let name_key =
                args.geometry_name_key.as_deref().unwrap_or(&config.geometry_name_key);
            let set = load_geometry(&path, name_key)?;
            let policy = if args.snap_nearest_centroid || config.snap_nearest_centroid {
                AssignPolicy::SnapNearestCentroid
            } else {
                AssignPolicy::Unassigned
            };
            let density = density_map(&records, &set.areas, policy)?;
            write_atomic(&args.out_dir.join("density.csv"), density.to_csv().as_bytes())?;
            let doc = load_geometry_doc(&path)?;
            let annotated = annotate_geojson_counts(&doc, name_key, &density)?;
            let mut geojson =
                serde_json::to_string_pretty(&annotated).expect("annotated geojson serializes");
            geojson.push('\n');
            write_atomic(&args.out_dir.join("density.geojson"), geojson.as_bytes())?;
            if args.svg {
                let values: BTreeMap<String, f64> =
                    density.per_area.iter().map(|(k, &v)| (k.clone(), v as f64)).collect();
                write_atomic(
                    &args.out_dir.join("density.svg"),
                    crate::svg::choropleth("posts per area", &set.areas, &values).as_bytes(),
                )?;
            }
            if density.unassigned > 0 {
                eprintln!("warning: {} posts outside every area", density.unassigned);
            }
        }
        None => {
            eprintln!("note: no geometry given; skipping density outputs");
        }
    }

    write_atomic(
        &args.out_dir.join("effective_config.json"),
        config
            .effective_json("report", serde_json::json!({ "merged": args.merged }))
            .as_bytes(),
    )?;
    println!("report artifacts written to {}", args.out_dir.display());
    Ok(())
}
