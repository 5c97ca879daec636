from __future__ import annotations

import json

import pytest

from main import EXIT_ERROR, EXIT_OK, build_parser, main
from scene.generators import list_scenes
from scene.loader import read_scene


def test_scenes_lists_every_builtin(capsys):
    assert main(["scenes"]) == EXIT_OK
    assert capsys.readouterr().out.split() == list_scenes()


def test_gen_writes_a_scene_file(tmp_path):
    out = tmp_path / "stack.json"
    assert main(["gen", "stack", "--out", str(out)]) == EXIT_OK
    assert [o.name for o in read_scene(out).objects][:2] == ["floor", "base"]


def test_unknown_scene_is_an_error():
    assert main(["srmap", "castle"]) == EXIT_ERROR


def test_plan_prints_a_record_and_saves_the_scene(tmp_path, capsys):
    out = tmp_path / "placed.json"
    code = main(["plan", "cube", "--density", "20", "--max-iters", "100", "--out", str(out)])
    assert code == EXIT_OK
    record = json.loads(next(line for line in capsys.readouterr().out.splitlines() if line.startswith("{")))
    assert record["object"] == "cube" and record["success"]
    assert len(record["quaternion"]) == 4
    saved = read_scene(out)
    assert [o.name for o in saved.objects] == ["floor", "cube"]
    assert saved.queue == []


def test_plan_of_a_missing_queued_object_is_an_error():
    assert main(["plan", "blocks", "nothing", "--density", "20"]) == EXIT_ERROR


def test_srmap_exports_ply(tmp_path):
    out = tmp_path / "map.ply"
    assert main(["srmap", "cube", "--density", "5", "--out", str(out)]) == EXIT_OK
    assert out.read_text(encoding="ascii").startswith("ply\n")


def test_invalid_config_is_an_error():
    assert main(["plan", "cube", "--restarts", "0"]) == EXIT_ERROR


def test_parser_rejects_unknown_variant():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["plan", "cube", "--variant", "magic"])
