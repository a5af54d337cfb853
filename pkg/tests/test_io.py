import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from coherent_control import OrthonormalBasis, haar_unitary, random_goia_program, random_state
from coherent_control.errors import ParseError, ValidationError
from coherent_control.io import (basis_from_json, basis_to_json, channel_from_json,
                                 channel_to_json, dumps, load_matrix, load_state,
                                 program_from_json, program_to_json, save_state, state_from_json,
                                 state_to_json)
from coherent_control.channels import random_incoherent_channel


def test_state_round_trip(tmp_path):
    rho = random_state((2, 3), seed=0)
    path = tmp_path / "rho.json"
    save_state(rho, path)
    back = load_state(path)
    assert back.dims == rho.dims
    assert np.array_equal(back.mat, rho.mat)       # 17 digits round-trip exactly


def test_non_square_matrix_is_parse_error():
    obj = {"dims": [2], "matrix": [[[1, 0], [0, 0]]]}
    with pytest.raises(ParseError) as exc:
        state_from_json(obj)
    assert exc.value.location == "state.matrix"


def test_dims_mismatch_is_parse_error():
    obj = state_to_json(random_state((2, 2), seed=0))
    obj["dims"] = [3]
    with pytest.raises(ParseError):
        state_from_json(obj)


@pytest.mark.parametrize("obj, where", [
    ({"matrix": []}, "state"),
    ({"dims": [2], "matrix": [[[1, 0], "x"], [[0, 0], [0, 0]]]}, "state.matrix[0][1]"),
    ({"dims": [0], "matrix": [[[1, 0]]]}, "state.dims"),
    ([1, 2], "state"),
])
def test_parse_errors_name_the_field(obj, where):
    with pytest.raises(ParseError) as exc:
        state_from_json(obj)
    assert exc.value.location == where
    assert str(exc.value).startswith(where)


def test_invalid_state_is_validation_error():
    obj = {"dims": [2], "matrix": [[[0.7, 0], [0, 0]], [[0, 0], [0.7, 0]]]}
    with pytest.raises(ValidationError):
        state_from_json(obj)


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dims": [2],\n "matrix": [}')
    with pytest.raises(ParseError) as exc:
        load_state(path)
    assert exc.value.location.startswith(f"{path}:2:")


def test_load_matrix_without_dims(tmp_path):
    u = haar_unitary(3, 1)
    path = tmp_path / "u.json"
    path.write_text(json.dumps({"matrix": [[[z.real, z.imag] for z in row] for row in u]}))
    assert_allclose(load_matrix(path), u, atol=1e-15)


def test_basis_round_trip():
    basis = OrthonormalBasis(haar_unitary(3, 2))
    back = basis_from_json(json.loads(dumps(basis_to_json(basis))))
    assert np.array_equal(back.matrix, basis.matrix)


def test_channel_round_trip():
    ch = random_incoherent_channel(3, seed=3)
    back = channel_from_json(json.loads(dumps(channel_to_json(ch))))
    assert back.in_dims == ch.in_dims and back.n_kraus == ch.n_kraus
    for a, b in zip(ch.kraus, back.kraus):
        assert np.array_equal(a, b)


def test_program_round_trip():
    prog = random_goia_program((2, 2), 6, seed=4, basis=OrthonormalBasis(haar_unitary(2, 4)))
    back = program_from_json(json.loads(dumps(program_to_json(prog))))
    assert [s.kind for s in back.steps] == [s.kind for s in prog.steps]
    rho = random_state((2, 2), seed=4)
    for x, y in zip(prog.run(rho).branches, back.run(rho).branches):
        assert_allclose(x.state.mat, y.state.mat, atol=1e-12)


def test_unknown_step_kind():
    with pytest.raises(ParseError) as exc:
        program_from_json({"in_dims": [2, 2], "steps": [{"kind": "Teleport"}]})
    assert exc.value.location == "program.steps[0].kind"


def test_dumps_is_deterministic():
    obj = {"b": 0.1, "a": [1, 2.0, float("inf")], "c": complex(1, -2), "d": np.float64(1 / 3)}
    text = dumps(obj)
    assert text == dumps(dict(reversed(list(obj.items()))))
    parsed = json.loads(text)
    assert list(parsed) == ["a", "b", "c", "d"]
    assert parsed["a"] == [1, 2.0, "inf"]
    assert parsed["c"] == {"im": -2.0, "re": 1.0}
    assert "0.33333333333333331" in text
