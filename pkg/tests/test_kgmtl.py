"""Multi-task model: closed forms, oracles, decoupling, planted recovery."""

import numpy as np
import pytest

from repositioner.data import KnowledgeGraph, MoleculeGraph, NotFoundError, ProteinSequence
from repositioner.data.tables import ATOM_FEATURE_DIM
from repositioner.fixtures import kgmtl_fixture
from repositioner.kgmtl import (
    KgMtlConfig,
    extract_subgraph,
    init_kgmtl_params,
    mol_gcn_readout,
    predict_dti,
    protein_encode,
    rgcn_forward,
    shared_unit_apply,
    train_kg_mtl,
)
from repositioner.kgmtl.model import Subgraph, cpi_loss_and_grads, dti_loss_and_grads
from repositioner.numerics import derive_rng, finite_diff_check
from repositioner.predictors import compute_auroc


def tiny_subgraph():
    kg = KnowledgeGraph()
    for e in ("a", "b", "c", "d"):
        kg.add_entity(e, e.upper(), "other")
    kg.add_triple("a", "r1", "b")
    kg.add_triple("c", "r1", "b")
    kg.add_triple("b", "r2", "d")
    return extract_subgraph(kg, ["a", "b", "c", "d"], hops=2, budget=10)


def rgcn_params(sub, h, seed=0, identity=False):
    rng = derive_rng(seed, "rgcn-test")
    params = {}
    for l in range(3):
        for rel in sub.relations:
            params[f"rgcn.l{l}.rel.{rel}"] = (np.eye(h) if identity
                                              else rng.normal(size=(h, h)) * 0.4)
        params[f"rgcn.l{l}.self"] = np.eye(h) if identity else rng.normal(size=(h, h)) * 0.4
    return params


class TestRgcn:
    def test_zero_weights_give_zero(self):
        sub = tiny_subgraph()
        params = {k: np.zeros_like(v) for k, v in rgcn_params(sub, 3).items()}
        feats = derive_rng(1, "rgcn-feat").normal(size=(4, 3))
        out = rgcn_forward(sub, feats, params, n_layers=3)
        assert np.all(out == 0)

    def test_one_neighbor_identity_weights_closed_form(self):
        kg = KnowledgeGraph()
        kg.add_entity("i", "I", "other")
        kg.add_entity("j", "J", "other")
        kg.add_triple("j", "r", "i")   # message flows head -> tail
        sub = extract_subgraph(kg, ["i", "j"], hops=1, budget=5)
        params = rgcn_params(sub, 2, identity=True)
        feats = np.array([[1.0, 2.0], [10.0, 20.0]])
        out = rgcn_forward(sub, feats, params, n_layers=1, activation="identity")
        np.testing.assert_allclose(out[sub.index("i")], feats[0] + feats[1])
        np.testing.assert_allclose(out[sub.index("j")], feats[1])  # self loop only

    def test_matches_dense_oracle(self):
        sub = tiny_subgraph()
        params = rgcn_params(sub, 3, seed=5)
        feats = derive_rng(2, "rgcn-feat").normal(size=(4, 3))
        got = rgcn_forward(sub, feats, params, n_layers=2)
        h = feats
        for l in range(2):
            total = h @ params[f"rgcn.l{l}.self"]
            for rel in sub.relations:
                total = total + sub.operators[rel] @ h @ params[f"rgcn.l{l}.rel.{rel}"]
            h = np.maximum(total, 0.0)
        np.testing.assert_allclose(got, h, atol=1e-12)

    def test_isolated_node_gets_self_term_only(self):
        kg = KnowledgeGraph()
        kg.add_entity("x", "X", "other")
        kg.add_entity("y", "Y", "other")
        kg.add_triple("x", "r", "x")
        sub = extract_subgraph(kg, ["x", "y"], hops=1, budget=4)
        assert "y" in sub
        params = rgcn_params(sub, 2, seed=6)
        feats = derive_rng(3, "rgcn-feat").normal(size=(2, 2))
        out = rgcn_forward(sub, feats, params, n_layers=1)
        want = np.maximum(feats[sub.index("y")] @ params["rgcn.l0.self"], 0.0)
        np.testing.assert_allclose(out[sub.index("y")], want, atol=1e-12)


def make_molecule(seed, n_atoms=4):
    rng = derive_rng(seed, "mol")
    atoms = rng.normal(size=(n_atoms, ATOM_FEATURE_DIM))
    bonds = [(i, i + 1) for i in range(n_atoms - 1)]
    return MoleculeGraph(atoms=atoms, bonds=bonds)


def molgcn_params(seed=0, h=5):
    rng = derive_rng(seed, "molgcn-test")
    return {
        "molgcn.W0": rng.normal(size=(ATOM_FEATURE_DIM, h)) * 0.1,
        "molgcn.b0": rng.normal(size=h) * 0.1,
        "molgcn.W1": rng.normal(size=(h, h)) * 0.3,
        "molgcn.b1": rng.normal(size=h) * 0.1,
    }


class TestMolGcn:
    def test_single_atom_mean_over_one(self):
        mol = make_molecule(0, n_atoms=1)
        params = molgcn_params()
        out = mol_gcn_readout(mol, params)
        h = np.maximum(mol.atoms @ params["molgcn.W0"] + params["molgcn.b0"], 0.0)
        h = np.maximum(h @ params["molgcn.W1"] + params["molgcn.b1"], 0.0)
        np.testing.assert_allclose(out, h[0], atol=1e-12)

    def test_permutation_invariance(self):
        mol = make_molecule(1, n_atoms=5)
        params = molgcn_params(1)
        rng = derive_rng(2, "perm")
        perm = rng.permutation(5)
        inverse = np.argsort(perm)
        permuted = MoleculeGraph(
            atoms=mol.atoms[perm],
            bonds=[(int(inverse[a]), int(inverse[b])) for a, b in mol.bonds])
        np.testing.assert_allclose(mol_gcn_readout(mol, params),
                                   mol_gcn_readout(permuted, params), atol=1e-12)

    def test_matches_dense_oracle(self):
        mol = make_molecule(3, n_atoms=4)
        params = molgcn_params(3)
        adj = mol.adjacency() + np.eye(4)
        h = np.maximum(adj @ mol.atoms @ params["molgcn.W0"] + params["molgcn.b0"], 0.0)
        h = np.maximum(adj @ h @ params["molgcn.W1"] + params["molgcn.b1"], 0.0)
        np.testing.assert_allclose(mol_gcn_readout(mol, params), h.mean(axis=0),
                                   atol=1e-12)


def protein_params(config, seed=0):
    rng = derive_rng(seed, "prot-test")
    pe, c = config.protein_embed_dim, config.protein_channels
    params = {"prot.embed": rng.normal(size=(21, pe)) * 0.5}
    for w in config.protein_kernels:
        params[f"prot.k{w}.W"] = rng.normal(size=(w * pe, c)) * 0.3
        params[f"prot.k{w}.b"] = rng.normal(size=c) * 0.1
    params["prot.out.W"] = rng.normal(size=(len(config.protein_kernels) * c, config.hidden)) * 0.3
    params["prot.out.b"] = np.zeros(config.hidden)
    return params


class TestProteinEncoder:
    config = KgMtlConfig(hidden=6, protein_embed_dim=4, protein_channels=3,
                         protein_kernels=(2, 3))

    def test_constant_sequence_constant_convolution(self):
        params = protein_params(self.config)
        out1 = protein_encode(ProteinSequence("t", "AAAAAA"), params, self.config)
        out2 = protein_encode(ProteinSequence("t", "AAAAAAAAAA"), params, self.config)
        np.testing.assert_allclose(out1, out2, atol=1e-12)

    def test_suffix_beyond_max_window_can_change_nothing(self):
        params = protein_params(self.config, seed=1)
        base = "ACDEFGHIKL"
        # zero the 'X' embedding row so windows in the suffix never win the max
        params["prot.embed"][20] *= 0.0
        a = protein_encode(ProteinSequence("t", base + "XX"), params, self.config)
        b = protein_encode(ProteinSequence("t", base + "XXX"), params, self.config)
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_matches_sliding_window_oracle(self):
        config = self.config
        params = protein_params(config, seed=2)
        seq = ProteinSequence("t", "ACDEFG")
        got = protein_encode(seq, params, config)
        idx = seq.encode()
        emb = params["prot.embed"][idx]
        pooled = []
        for w in config.protein_kernels:
            acts = []
            for start in range(len(idx) - w + 1):
                window = emb[start:start + w].reshape(-1)
                acts.append(np.maximum(window @ params[f"prot.k{w}.W"]
                                       + params[f"prot.k{w}.b"], 0.0))
            pooled.append(np.max(np.stack(acts), axis=0))
        want = np.concatenate(pooled) @ params["prot.out.W"] + params["prot.out.b"]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_too_short_sequence_rejected(self):
        params = protein_params(self.config)
        with pytest.raises(ValueError, match="shorter than kernel"):
            protein_encode(ProteinSequence("t", "AC"), params, self.config)


def unit_params(h, seed=0, passthrough=False):
    rng = derive_rng(seed, "unit-test")
    params = {}
    for name in ("dd", "dg", "gg", "gd"):
        if passthrough:
            params[f"unit.W{name}"] = np.ones(h) if name in ("dd", "gg") else np.zeros(h)
        else:
            params[f"unit.W{name}"] = rng.normal(size=h)
        params[f"unit.P{name}"] = rng.normal(size=(h * h, h)) * 0.2
    params["unit.bd"] = rng.normal(size=h) * 0.1
    params["unit.bg"] = rng.normal(size=h) * 0.1
    return params


class TestSharedUnit:
    def test_first_stage_passthrough_is_bitwise(self):
        h = 4
        params = unit_params(h, passthrough=True)
        rng = derive_rng(1, "unit-x")
        x_d, x_g = rng.normal(size=h), rng.normal(size=h)
        result = shared_unit_apply(x_d, x_g, params)
        assert np.array_equal(result.x_prime_d, x_d)
        assert np.array_equal(result.x_prime_g, x_g)

    def test_cross_matrix_rank_at_most_one(self):
        h = 5
        params = unit_params(h, seed=2)
        rng = derive_rng(3, "unit-x")
        result = shared_unit_apply(rng.normal(size=h), rng.normal(size=h), params)
        assert np.linalg.matrix_rank(result.cross, tol=1e-10) <= 1

    def test_matches_hand_expanded_arithmetic(self):
        h = 4
        params = unit_params(h, seed=4)
        rng = derive_rng(5, "unit-x")
        x_d, x_g = rng.normal(size=h), rng.normal(size=h)
        result = shared_unit_apply(x_d, x_g, params)
        xpd = params["unit.Wdd"] * x_d + params["unit.Wgd"] * x_g
        xpg = params["unit.Wgg"] * x_g + params["unit.Wdg"] * x_d
        cross = np.outer(xpd, xpg)
        want_d = cross.reshape(-1) @ params["unit.Pdd"] \
            + cross.T.reshape(-1) @ params["unit.Pgd"] + params["unit.bd"]
        want_g = cross.reshape(-1) @ params["unit.Pgg"] \
            + cross.T.reshape(-1) @ params["unit.Pdg"] + params["unit.bg"]
        np.testing.assert_allclose(result.x_out_d, want_d, atol=1e-12)
        np.testing.assert_allclose(result.x_out_g, want_g, atol=1e-12)

    def test_dimension_mismatch(self):
        params = unit_params(4)
        with pytest.raises(ValueError, match="share"):
            shared_unit_apply(np.zeros(4), np.zeros(3), params)
        with pytest.raises(ValueError, match="projection"):
            shared_unit_apply(np.zeros(3), np.zeros(3), params)


def small_config(**over):
    base = dict(hidden=8, protein_embed_dim=4, protein_channels=4,
                protein_kernels=(2, 4), epochs=40, batch_size=25, lr=1e-2)
    base.update(over)
    return KgMtlConfig(**base)


class TestTraining:
    def test_planted_fixture_both_tasks_recover(self):
        kg, molecules, proteins, dti, cpi, group = kgmtl_fixture(seed=5)
        config = small_config(epochs=60)
        model = train_kg_mtl(kg, dti, cpi, molecules, proteins, config, seed=3)
        dti_scores = [predict_dti(model, d, t) for d, t, _ in dti]
        dti_labels = [l for _, _, l in dti]
        assert compute_auroc(np.array(dti_scores), np.array(dti_labels)) >= 0.95
        from repositioner.kgmtl import predict_cpi
        cpi_scores = [predict_cpi(model, c, p) for c, p, _ in cpi]
        cpi_labels = [l for _, _, l in cpi]
        assert compute_auroc(np.array(cpi_scores), np.array(cpi_labels)) >= 0.95
        assert model.dti_loss_history[-1] < model.dti_loss_history[0]
        assert model.cpi_loss_history[-1] < model.cpi_loss_history[0]

    def test_decoupled_config_matches_independent_baselines(self):
        kg, molecules, proteins, dti, cpi, _ = kgmtl_fixture(seed=5)
        config = small_config(shared_unit=False, epochs=10)
        joint = train_kg_mtl(kg, dti, cpi, molecules, proteins, config, seed=7)
        dti_only = train_kg_mtl(kg, dti, [], molecules, proteins,
                                small_config(shared_unit=False, epochs=10,
                                             tasks=("dti",)), seed=7)
        cpi_only = train_kg_mtl(kg, [], cpi, molecules, proteins,
                                small_config(shared_unit=False, epochs=10,
                                             tasks=("cpi",)), seed=7)
        np.testing.assert_allclose(joint.dti_loss_history, dti_only.dti_loss_history,
                                   atol=1e-6)
        np.testing.assert_allclose(joint.cpi_loss_history, cpi_only.cpi_loss_history,
                                   atol=1e-6)

    def test_same_seed_bit_identical(self):
        kg, molecules, proteins, dti, cpi, _ = kgmtl_fixture(seed=5)
        config = small_config(epochs=4)
        m1 = train_kg_mtl(kg, dti, cpi, molecules, proteins, config, seed=9)
        m2 = train_kg_mtl(kg, dti, cpi, molecules, proteins, config, seed=9)
        for k in m1.params:
            np.testing.assert_array_equal(m1.params[k], m2.params[k])

    def test_unresolvable_pair_rejected(self):
        kg, molecules, proteins, dti, cpi, _ = kgmtl_fixture(seed=5)
        with pytest.raises(NotFoundError):
            train_kg_mtl(kg, dti + [("GHOST", "KT0", 1)], cpi, molecules, proteins,
                         small_config(epochs=1), seed=0)
        with pytest.raises(NotFoundError, match="molecule"):
            train_kg_mtl(kg, dti, cpi + [("KT0", "KT0", 1)], molecules, proteins,
                         small_config(epochs=1), seed=0)

    def test_predict_dti_properties(self):
        kg, molecules, proteins, dti, cpi, _ = kgmtl_fixture(seed=5)
        config = small_config(epochs=3)
        model = train_kg_mtl(kg, dti, cpi, molecules, proteins, config, seed=11)
        p = predict_dti(model, "KD0", "KT0")
        assert 0.0 < p < 1.0
        # raising the head bias raises the probability (logistic is monotone)
        model.params["dti_head.b1"] = model.params["dti_head.b1"] + 1.0
        assert predict_dti(model, "KD0", "KT0") > p
        with pytest.raises(NotFoundError):
            predict_dti(model, "GHOST", "KT0")

    def test_zero_weight_head_gives_half(self):
        kg, molecules, proteins, dti, cpi, _ = kgmtl_fixture(seed=5)
        model = train_kg_mtl(kg, dti, cpi, molecules, proteins,
                             small_config(epochs=1), seed=13)
        model.params["dti_head.W1"] = np.zeros_like(model.params["dti_head.W1"])
        model.params["dti_head.b1"] = np.zeros_like(model.params["dti_head.b1"])
        assert predict_dti(model, "KD0", "KT0") == 0.5


class TestGradients:
    def test_task_losses_match_finite_differences(self):
        kg, molecules, proteins, dti, cpi, _ = kgmtl_fixture(seed=5, n_drugs=4,
                                                             n_targets=4, n_context=4)
        config = KgMtlConfig(hidden=4, protein_embed_dim=3, protein_channels=2,
                             protein_kernels=(2, 3), epochs=1, batch_size=4)
        sub = extract_subgraph(kg, [d for d, _, _ in dti] + [t for _, t, _ in dti])
        params = init_kgmtl_params(sub, config, seed=1)
        from repositioner.kgmtl.model import KgMtlModel
        model = KgMtlModel(params=params, config=config, subgraph=sub,
                           molecules=molecules, proteins=proteins)
        pairs = [(d, t) for d, t, _ in dti[:4]]
        labels = np.array([float(l) for _, _, l in dti[:4]])
        _, grads = dti_loss_and_grads(params, model, pairs, labels)
        keys = sorted(grads)

        def fn(arrays):
            p = dict(params)
            p.update(dict(zip(keys, arrays)))
            value, _ = dti_loss_and_grads(p, model, pairs, labels)
            return value

        err = finite_diff_check(fn, [params[k] for k in keys], [grads[k] for k in keys])
        assert err <= 1e-4

        cpairs = [(c, p) for c, p, _ in cpi[:4]]
        clabels = np.array([float(l) for _, _, l in cpi[:4]])
        _, cgrads = cpi_loss_and_grads(params, model, cpairs, clabels)
        ckeys = sorted(cgrads)

        def cfn(arrays):
            p = dict(params)
            p.update(dict(zip(ckeys, arrays)))
            value, _ = cpi_loss_and_grads(p, model, cpairs, clabels)
            return value

        cerr = finite_diff_check(cfn, [params[k] for k in ckeys], [cgrads[k] for k in ckeys])
        assert cerr <= 1e-4
