use dctprune::codec::{dequantize, encode_block, quantize, BlockGrid, CoefficientBlock, QuantTable};
use dctprune::{compress_image, image, lookup, CompressOptions, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const IMAGE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/images");

fn load(name: &str) -> GrayImage {
    image::load(format!("{IMAGE_DIR}/{name}.pgm")).unwrap()
}

fn noise(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(w, h, |x, y| ((x * 3 + y * 2) as u8).wrapping_add(rng.gen_range(0..32))).unwrap()
}

#[test]
fn folded_and_explicit_scaling_quantize_identically() {
    let img = load("camera");
    let grid = BlockGrid::partition(&img);
    for name in ["exact-dct", "lodct", "lodct-p4", "mrdct", "mrdct-p6", "sdct", "rdct"] {
        let t = lookup(name).unwrap();
        for quality in [10, 50, 90] {
            let table = CompressOptions { quality, ..Default::default() }.table(t.prune_k()).unwrap();
            for b in &grid.blocks {
                assert_eq!(
                    encode_block(&t, b, &table, false).unwrap(),
                    encode_block(&t, b, &table, true).unwrap(),
                    "{name} q{quality}"
                );
            }
        }
    }
}

#[test]
fn folded_mode_reconstructs_identically() {
    let img = noise(40, 24, 1);
    for name in ["lodct-p4", "mrdct-p6"] {
        let t = lookup(name).unwrap();
        let plain = compress_image(&img, &t, &CompressOptions::default()).unwrap().0;
        let folded = compress_image(&img, &t, &CompressOptions { folded: true, ..Default::default() }).unwrap().0;
        assert_eq!(plain, folded);
    }
}

#[test]
fn dequantization_error_is_at_most_half_a_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let table = QuantTable::luminance(50).unwrap();
    for _ in 0..200 {
        let c = CoefficientBlock { k: 8, data: (0..64).map(|_| rng.gen_range(-1024.0..1024.0)).collect() };
        let back = dequantize(&quantize(&c, &table).unwrap(), &table).unwrap();
        for (idx, (a, b)) in c.data.iter().zip(&back.data).enumerate() {
            assert!((a - b).abs() <= table.step(idx / 8, idx % 8) as f64 / 2.0);
        }
    }
}

#[test]
fn compression_is_deterministic() {
    let img = load("chelsea");
    let t = lookup("mrdct-p6").unwrap();
    let opts = CompressOptions::default();
    let (a, ra) = compress_image(&img, &t, &opts).unwrap();
    for _ in 0..3 {
        let (b, rb) = compress_image(&img, &t, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.psnr_db.to_bits(), rb.psnr_db.to_bits());
        assert_eq!(ra.ssim.map(f64::to_bits), rb.ssim.map(f64::to_bits));
    }
}

#[test]
fn odd_sized_images_keep_their_size() {
    let img = load("chelsea");
    assert_eq!((img.width(), img.height()), (451, 300));
    let grid = BlockGrid::partition(&img);
    assert_eq!((grid.pad_right, grid.pad_bottom), (5, 4));
    assert_eq!((img.width() + grid.pad_right) % 8, 0);
    assert_eq!(grid.reassemble(), img);
    let (rec, report) = compress_image(&img, &lookup("lodct-p4").unwrap(), &CompressOptions::default()).unwrap();
    assert_eq!((rec.width(), rec.height()), (451, 300));
    assert!(report.psnr_db > 20.0);
}

#[test]
fn exact_dct_beats_pruned_approximations_per_image() {
    let opts = CompressOptions::default();
    for name in ["lena", "baboon", "camera", "astronaut", "moon", "coffee", "chelsea"] {
        let img = load(name);
        let psnr = |t: &str| compress_image(&img, &lookup(t).unwrap(), &opts).unwrap().1.psnr_db;
        let exact = psnr("exact-dct");
        assert!(exact >= psnr("lodct-p4"), "{name}");
        assert!(exact >= psnr("mrdct-p6"), "{name}");
    }
}

#[test]
fn unit_steps_are_near_lossless_for_orthogonal_transforms() {
    let img = noise(64, 48, 9);
    let opts = CompressOptions { quality: 100, quant_unit: true, folded: false };
    for name in ["exact-dct", "lodct", "mrdct", "rdct"] {
        let report = compress_image(&img, &lookup(name).unwrap(), &opts).unwrap().1;
        assert!(report.psnr_db >= 50.0, "{name}: {}", report.psnr_db);
    }
}
