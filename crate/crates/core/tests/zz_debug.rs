use splatmark_core::grid::{load_bitgrid, GridFormat};
use splatmark_core::partition::{partition_marker, PartitionColors};
use splatmark_core::render::*;
use splatmark_core::splat::*;

#[test]
fn find_bad_modules() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/qr_huge.txt");
    let g = load_bitgrid(std::path::Path::new(path), GridFormat::Textgrid).unwrap();
    let part = partition_marker(&g, PartitionColors::Both).unwrap();
    let set = marker_to_splats(&part, &ApproxConfig::default(), &MarkerPlane::default(), "qr").unwrap();
    let cam = marker_camera(512, 512, default_focal(512, 512), default_view_distance(), 0.0, 0.0).unwrap();
    let img = render(&set, &cam, &RenderConfig::default()).unwrap();
    let (w, h) = (105.0f64, 105.0f64);
    let side = 2.0 / 105.0;
    let mut bad = vec![];
    for row in 0..105 {
        for col in 0..105 {
            let px = (col as f64 + 0.5 - w / 2.0) * side;
            let py = (h / 2.0 - (row as f64 + 0.5)) * side;
            let world = set.plane.lift([px, py]);
            let (x, y) = cam.project(world).unwrap();
            let s = img.sample_bilinear(x, y);
            let dark = s < 0.5;
            if dark != (g.get(row, col) == 1) {
                bad.push((row, col, s, g.get(row, col)));
            }
        }
    }
    println!("bad count: {}", bad.len());
    for (r, c, s, truth) in &bad {
        println!("  module ({r},{c}): sample {s:.4}, truth {truth}");
        // what rect contains this cell and what are its dims?
        for comp in &part.components {
            for rect in &comp.rects {
                if (rect.x0..rect.x1).contains(&(*c as i64)) && (rect.y0..rect.y1).contains(&(*r as i64)) && comp.color == *truth {
                    println!("    rect ({},{})..({},{}) {}x{} color={}", rect.x0, rect.y0, rect.x1, rect.y1, rect.width(), rect.height(), comp.color);
                }
            }
        }
    }
}
