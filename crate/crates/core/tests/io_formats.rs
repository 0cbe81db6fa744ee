use std::path::PathBuf;

use mtdespeckle::denoiser::{AffineRange, Architecture, ConvNet, DenoiserModel};
use mtdespeckle::io::*;
use mtdespeckle::prelude::*;
use mtdespeckle::{ErrorClass, FormatError, ManifestError};
use proptest::prelude::*;

fn f32_image() -> impl Strategy<Value = IntensityImage> {
    (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f32..1e6, w * h).prop_map(move |d| {
            IntensityImage::new(w, h, d.into_iter().map(f64::from).collect()).unwrap()
        })
    })
}

fn header(magic: &[u8; 4], version: u32, w: u32, h: u32, dtype: u32) -> Vec<u8> {
    let mut b = magic.to_vec();
    for v in [version, w, h, dtype] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b
}

fn format_kind(bytes: &[u8]) -> FormatError {
    decode_raster(bytes).unwrap_err()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raster_round_trip_is_bit_exact(img in f32_image()) {
        let bytes = encode_raster(&img).unwrap();
        prop_assert_eq!(bytes.len(), 20 + 4 * img.len());
        let back = decode_raster(&bytes).unwrap();
        prop_assert_eq!(&back, &img);
        prop_assert_eq!(encode_raster(&back).unwrap(), bytes);
    }

    #[test]
    fn model_round_trip_is_bit_exact(seed in any::<u64>(), layers in 1usize..4, channels in 1usize..5) {
        let arch = Architecture::new(layers, channels, 3).unwrap();
        let net = ConvNet::init(arch, RngSeed(seed)).unwrap();
        let range = AffineRange::new(-3.25, 7.5).unwrap();
        let model = DenoiserModel::from_net(&net, range, LooksCount::new(2.0).unwrap()).unwrap();
        let bytes = encode_model(&model);
        prop_assert_eq!(bytes.len(), 44 + 4 * arch.param_count());
        let back = decode_model(&bytes).unwrap();
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(encode_model(&back), bytes);
    }
}

#[test]
fn raster_layout_is_little_endian() {
    let img = IntensityImage::new(2, 1, vec![1.0, 0.5]).unwrap();
    let mut want = header(b"RDIM", 1, 2, 1, 1);
    want.extend_from_slice(&[0, 0, 0x80, 0x3f, 0, 0, 0, 0x3f]);
    assert_eq!(encode_raster(&img).unwrap(), want);
}

#[test]
fn malformed_rasters_are_classified() {
    let good = encode_raster(&IntensityImage::constant(3, 2, 1.0).unwrap()).unwrap();
    assert!(matches!(format_kind(b"RDI"), FormatError::Truncated { .. }));
    assert_eq!(format_kind(&header(b"RDIX", 1, 3, 2, 1)), FormatError::BadMagic(*b"RDIX"));
    assert_eq!(format_kind(&header(b"RDIM", 2, 3, 2, 1)), FormatError::UnsupportedVersion(2));
    assert_eq!(format_kind(&header(b"RDIM", 1, 3, 2, 7)), FormatError::UnsupportedDtype(7));
    assert_eq!(format_kind(&header(b"RDIM", 1, 0, 2, 1)), FormatError::DimensionOverflow);
    assert_eq!(
        format_kind(&good[..good.len() - 1]),
        FormatError::Truncated { expected: 44, found: 43 }
    );
    let mut long = good.clone();
    long.push(0);
    assert_eq!(format_kind(&long), FormatError::TrailingBytes { expected: 44, found: 45 });
    let mut negative = good;
    negative[20..24].copy_from_slice(&(-1.0f32).to_le_bytes());
    assert!(matches!(format_kind(&negative), FormatError::InvalidValue(_)));
}

#[test]
fn malformed_models_are_classified() {
    let arch = Architecture::new(2, 2, 3).unwrap();
    let model = DenoiserModel::from_net(
        &ConvNet::init(arch, RngSeed(1)).unwrap(),
        AffineRange::new(0.0, 1.0).unwrap(),
        LooksCount::SINGLE,
    )
    .unwrap();
    let good = encode_model(&model);
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(decode_model(&bad), Err(FormatError::BadMagic(_))));
    let mut bad = good.clone();
    bad[4] = 9;
    assert_eq!(decode_model(&bad), Err(FormatError::UnsupportedVersion(9)));
    assert!(matches!(decode_model(&good[..30]), Err(FormatError::Truncated { .. })));
    assert!(matches!(
        decode_model(&good[..good.len() - 4]),
        Err(FormatError::Truncated { .. })
    ));
    let mut bad = good.clone();
    bad.extend_from_slice(&[0; 4]);
    assert!(matches!(decode_model(&bad), Err(FormatError::TrailingBytes { .. })));
    let mut bad = good.clone();
    bad[16..20].copy_from_slice(&4u32.to_le_bytes());
    assert!(matches!(decode_model(&bad), Err(FormatError::InvalidHeader(_))));
    let mut bad = good;
    bad[20..28].copy_from_slice(&5.0f64.to_le_bytes());
    assert!(matches!(decode_model(&bad), Err(FormatError::InvalidHeader(_))));
}

fn write_stack(dir: &std::path::Path, dates: &[&str]) -> StackManifest {
    let v = IntensityImage::constant(8, 6, 2.0).unwrap();
    let st = simulate_stack(&v, dates.len(), LooksCount::SINGLE, &[], 0, RngSeed(3)).unwrap();
    let mut entries = Vec::new();
    for (date, img) in dates.iter().zip(st.images()) {
        let path = PathBuf::from(format!("{date}.rdim"));
        write_raster(dir.join(&path), img).unwrap();
        entries.push(ManifestEntry { date: date.to_string(), path });
    }
    StackManifest {
        id: "fixture".into(),
        looks: 1.0,
        homogeneous_region: Some(Rect::new(0, 0, 4, 4)),
        entries,
        changes: vec![ChangeEvent { region: Rect::new(1, 1, 2, 2), first_date: 0, last_date: 1, gain: 2.0 }],
    }
}

#[test]
fn manifest_and_stack_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_stack(dir.path(), &["2020-01-01", "2020-01-13", "2020-01-25"]);
    let path = dir.path().join("stack.toml");
    save_manifest(&path, &m).unwrap();
    let (loaded, stack) = load_stack(&path).unwrap();
    assert_eq!(loaded, m);
    assert_eq!(StackManifest::from_toml(&m.to_toml()).unwrap(), m);
    assert_eq!(stack.len(), 3);
    assert_eq!(stack.dates()[1], "2020-01-13");
    for (img, e) in stack.images().iter().zip(&m.entries) {
        let bytes = std::fs::read(dir.path().join(&e.path)).unwrap();
        assert_eq!(encode_raster(img).unwrap(), bytes);
    }
}

#[test]
fn manifest_errors_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = write_stack(dir.path(), &["a", "b"]);
    let path = dir.path().join("m.toml");

    m.entries[1].date = "a".into();
    std::fs::write(&path, m.to_toml()).unwrap();
    let e = load_manifest(&path).unwrap_err();
    assert!(matches!(&e, Error::Manifest { kind: ManifestError::DuplicateDate(d), .. } if d == "a"));
    assert_eq!(e.class(), ErrorClass::Manifest);

    m.entries[1].date = "b".into();
    m.entries[1].path = "gone.rdim".into();
    std::fs::write(&path, m.to_toml()).unwrap();
    let e = load_manifest(&path).unwrap_err();
    assert!(matches!(&e, Error::Manifest { kind: ManifestError::MissingFile(_), .. }));
    assert_eq!(e.class(), ErrorClass::MissingFile);

    m.entries.truncate(1);
    std::fs::write(&path, m.to_toml()).unwrap();
    let e = load_manifest(&path).unwrap_err();
    assert!(matches!(&e, Error::Manifest { kind: ManifestError::TooFewEntries(1), .. }));

    std::fs::write(&path, "id = [").unwrap();
    let e = load_manifest(&path).unwrap_err();
    assert!(matches!(&e, Error::Manifest { kind: ManifestError::Parse(_), .. }));

    let e = load_manifest(dir.path().join("absent.toml")).unwrap_err();
    assert_eq!(e.class(), ErrorClass::MissingFile);
}

#[test]
fn stack_with_mismatched_rasters_is_a_dimension_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_stack(dir.path(), &["a", "b"]);
    write_raster(dir.path().join("b.rdim"), &IntensityImage::constant(5, 5, 1.0).unwrap()).unwrap();
    let path = dir.path().join("m.toml");
    save_manifest(&path, &m).unwrap();
    assert_eq!(load_stack(&path).unwrap_err().class(), ErrorClass::Dimension);
}

#[test]
fn corrupt_raster_on_disk_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.rdim");
    std::fs::write(&p, b"not a raster at all").unwrap();
    let e = read_raster(&p).unwrap_err();
    assert!(matches!(&e, Error::Format { kind: FormatError::BadMagic(_), .. }));
    assert_eq!(e.class(), ErrorClass::Format);
}

#[test]
fn scene_toml_round_trip_and_reference_render() {
    let scene = Scene::reference();
    let back = Scene::from_toml(&scene.to_toml()).unwrap();
    assert_eq!(back, scene);
    let v = scene.render().unwrap();
    assert_eq!(v.dims(), (128, 128));
    let (lo, hi) = v.data().iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(10.0 * (hi / lo).log10() >= 20.0 - 1e-9, "{lo} {hi}");
    let flat = v.crop(scene.homogeneous_region.unwrap()).unwrap();
    assert!(flat.data().iter().all(|&x| x == flat.data()[0]));
}

#[test]
fn preview_is_a_binary_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.pgm");
    let img = IntensityImage::from_fn(5, 4, |x, y| (x + y) as f64).unwrap();
    export_preview(&img, &p, 1.0).unwrap();
    let bytes = std::fs::read(&p).unwrap();
    assert!(bytes.starts_with(b"P5\n5 4\n255\n"));
    assert_eq!(bytes.len(), b"P5\n5 4\n255\n".len() + 20);
}
