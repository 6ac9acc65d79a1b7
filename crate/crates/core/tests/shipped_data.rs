use chronolapse::interface::{default_space, load_params_file};
use chronolapse::scene::{load_scene_file, serialize_scene, synth};

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

#[test]
fn ablation_scenes_match_the_generator() {
    for i in 0..5u64 {
        let path = format!("{DATA}/scenes/ablation_{i}.json");
        let shipped = load_scene_file(&path).unwrap();
        assert_eq!(shipped, synth::generate(i), "{path}");
        assert_eq!(std::fs::read_to_string(&path).unwrap(), serialize_scene(&shipped), "{path}");
    }
}

#[test]
fn shipped_files_load() {
    let scene = load_scene_file(format!("{DATA}/scenes/tutorial.json")).unwrap();
    load_params_file(format!("{DATA}/params/tutorial.json"), &scene).unwrap();
    default_space().validate().unwrap();
}
