"""
Tests for the text formats
"""

import numpy as np
import pytest

from sftperiods.errors import SpecParseError
from sftperiods.sft.model import Alphabet, Pattern, TorusConfig, WangTileset
from sftperiods.sft.ops import product
from sftperiods.sft.textio import (
    bundle_to_text,
    parse_bundle,
    parse_pattern,
    parse_sft,
    parse_spec_file,
    parse_torus,
    parse_wang,
    pattern_to_text,
    sft_to_text,
    torus_to_text,
    wang_to_text,
)
from sftperiods.sft.validity import is_valid

ALTERNATING = """%sft
dim: 2
name: alt
alphabet: a b
# horizontal neighbours differ
forbid:
(0,0) = a
(1,0) = a
forbid:
(0,0) = b
(1,0) = b
"""

BUNDLE = """%bundle
layer: X
%sft
dim: 1
alphabet: 0 1
forbid:
(0) = 1
(1) = 1
end
layer: Y
%sft
dim: 1
alphabet: p q
end
allow: 0 p
allow: 1 q
allow: 0 q
"""


class TestSftFormat:
    def test_parse(self):
        spec = parse_sft(ALTERNATING)
        assert spec.name == "alt"
        assert spec.dim == 2
        assert list(spec.alphabet) == ["a", "b"]
        assert len(spec.forbidden) == 2

    def test_round_trip_keeps_forbidden_set(self):
        spec = parse_sft(ALTERNATING)
        again = parse_sft(sft_to_text(spec))
        assert again.forbidden == spec.forbidden
        assert again.alphabet == spec.alphabet
        assert again.name == spec.name

    def test_unknown_symbol_reports_line(self):
        """Test that parse errors carry path and line"""
        text = ALTERNATING.replace("(1,0) = a", "(1,0) = c")
        with pytest.raises(SpecParseError) as err:
            parse_sft(text, "alt.sft")
        assert err.value.line == 8
        assert err.value.path == "alt.sft"
        assert "alt.sft:8:" in str(err.value)

    def test_wrong_arity_cell(self):
        with pytest.raises(SpecParseError):
            parse_sft(ALTERNATING.replace("(1,0) = a", "(1,0,0) = a"))

    def test_missing_header(self):
        with pytest.raises(SpecParseError) as err:
            parse_sft("dim: 2\nalphabet: a\n")
        assert err.value.line == 1

    def test_trailing_garbage(self):
        with pytest.raises(SpecParseError):
            parse_sft(ALTERNATING + "frobnicate: yes\n")

    def test_empty_forbid_block(self):
        with pytest.raises(SpecParseError):
            parse_sft("%sft\ndim: 1\nalphabet: a\nforbid:\n")


class TestWangFormat:
    def test_parse_with_tape(self):
        text = (
            "%wang\ncolors: r g\ntape: blank=r initial=g\n"
            "tile: one n=r e=g s=r w=g\ntile: two n=g e=g s=r w=g\n"
        )
        tiles = parse_wang(text)
        assert tiles.names == ["one", "two"]
        assert tiles.tape.blank == "r"
        assert tiles.tape.initial == "g"

    def test_round_trip(self):
        tiles = WangTileset.from_named([("t2", "b", "g", "r", "g"), ("t1", "r", "g", "r", "g")])
        again = parse_wang(wang_to_text(tiles))
        assert sorted(again.names) == ["t1", "t2"]
        for tile in again.tiles:
            original = next(t for t in tiles.tiles if t.name == tile.name)
            assert again.edge_tokens(tile) == tiles.edge_tokens(original)

    def test_missing_edge(self):
        with pytest.raises(SpecParseError):
            parse_wang("%wang\ncolors: r\ntile: t n=r e=r s=r\n")

    def test_unknown_color(self):
        with pytest.raises(SpecParseError):
            parse_wang("%wang\ncolors: r\ntile: t n=r e=r s=r w=x\n")


class TestBundleFormat:
    def test_parse_and_desugar(self):
        layers = parse_bundle(BUNDLE)
        assert layers.names == ("X", "Y")
        sft = product(layers)
        assert list(sft.alphabet) == ["0|p", "1|q", "0|q"]
        ok = TorusConfig.from_flat(sft.alphabet, (2,), [1, 0])
        bad = TorusConfig.from_flat(sft.alphabet, (2,), [1, 1])
        assert is_valid(ok, sft)
        assert not is_valid(bad, sft)

    def test_round_trip(self):
        layers = parse_bundle(BUNDLE)
        again = parse_bundle(bundle_to_text(layers))
        assert again.allowed == layers.allowed
        assert again.names == layers.names

    def test_wrong_allow_arity(self):
        with pytest.raises(SpecParseError):
            parse_bundle(BUNDLE + "allow: 1\n")

    def test_unclosed_layer(self):
        with pytest.raises(SpecParseError):
            parse_bundle("%bundle\nlayer: X\n%sft\ndim: 1\nalphabet: a\n")


class TestTorusFormat:
    def test_round_trip_2d(self):
        ab = Alphabet(["a", "b"])
        torus = TorusConfig.from_rows(ab, [["a", "b", "b"], ["b", "b", "a"]])
        text = torus_to_text(torus)
        assert text.splitlines()[3] == "row: a b b"
        assert parse_torus(text) == torus

    def test_round_trip_3d(self):
        ab = Alphabet(["a", "b"])
        torus = TorusConfig(ab, np.arange(12).reshape(2, 3, 2) % 2)
        text = torus_to_text(torus)
        assert "---" in text
        assert parse_torus(text) == torus

    def test_short_row(self):
        with pytest.raises(SpecParseError):
            parse_torus("%torus\ndims: 2 1\nalphabet: a\nrow: a\n")


class TestPatternFormat:
    def test_round_trip(self):
        ab = Alphabet(["a", "b"])
        pattern = Pattern((((0, 0), 0), ((3, -1), 1)))
        again, alphabet = parse_pattern(pattern_to_text(pattern, ab))
        assert again == pattern
        assert alphabet == ab

    def test_rejects_empty_pattern(self):
        with pytest.raises(SpecParseError):
            parse_pattern("%pattern\ndim: 2\nalphabet: a\n")

    def test_rejects_repeated_cell(self):
        with pytest.raises(SpecParseError):
            parse_pattern("%pattern\ndim: 1\nalphabet: a\n(0) = a\n(0) = a\n")


class TestSpecFileDispatch:
    def test_dispatch_on_header(self, tmp_path):
        sft_path = tmp_path / "alt.sft"
        sft_path.write_text(ALTERNATING)
        bundle_path = tmp_path / "pair.bundle"
        bundle_path.write_text(BUNDLE)
        assert parse_spec_file(sft_path).name == "alt"
        assert parse_spec_file(bundle_path).names == ("X", "Y")

    def test_unknown_header(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("%nonsense\n")
        with pytest.raises(SpecParseError) as err:
            parse_spec_file(path)
        assert err.value.line == 1
