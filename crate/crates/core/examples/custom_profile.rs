//! Read an SVG chart from another toolkit by describing its markup with a
//! selector profile. The profile lives in `profiles/d3-style.json` and is
//! also accepted by `chartcorpus extract --profile`.
//!
//! cargo run --example custom_profile

use chartcorpus::extract::{extract_chart, SelectorProfile};

const SVG: &str = r##"<svg xmlns="http://www.w3.org/2000/svg" width="400" height="300">
  <g class="tick y" transform="translate(40,250)"><text>0</text></g>
  <g class="tick y" transform="translate(40,150)"><text>50</text></g>
  <g class="tick y" transform="translate(40,50)"><text>100</text></g>
  <g class="tick x" transform="translate(100,260)"><text>North</text></g>
  <g class="tick x" transform="translate(200,260)"><text>South</text></g>
  <g class="tick x" transform="translate(300,260)"><text>West</text></g>
  <rect class="bar" x="80" y="90" width="40" height="160" fill="#4c72b0"/>
  <rect class="bar" x="180" y="180" width="40" height="70" fill="#4c72b0"/>
  <rect class="bar" x="280" y="135" width="40" height="115" fill="#4c72b0"/>
  <text class="ylabel">Units sold</text>
</svg>"##;

const PROFILE: &str = include_str!("../profiles/d3-style.json");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = SelectorProfile::from_json_str(PROFILE)?;
    let r = extract_chart(SVG, &profile)?;
    println!("confidence {:?}", r.confidence);
    for row in r.table.to_text_grid() {
        println!("{}", row.join(" | "));
    }
    Ok(())
}
