"""Toy commitments, the commit-and-open compiler, and its hybrids."""

from dataclasses import replace
from fractions import Fraction

import pytest

from poqlab.core import bit_sampler, point_mass
from poqlab.errors import NotPublicCoin
from poqlab.games import FunctionFamily
from poqlab.protocols import IVPoQ, Party, coin_party, ivpoq_accept_prob, silent_party
from poqlab.zk import (
    commitment_audit,
    compile_zk,
    compiler_completeness_report,
    hv_simulator,
    hvszk_transcript_premise_check,
    hybrid_provers_audit,
    simulator_report,
    toy_extractable_commitment,
)

F = Fraction


def identity_family():
    return FunctionFamily("identity", lambda lam: lam, lambda lam, x: x,
                          length_generic=True)


def xorfold_family():
    return FunctionFamily("xorfold", lambda lam: lam,
                          lambda lam, x: str(x.count("1") % 2),
                          length_generic=True)


def xor_mask_family():
    # injective on message||salt: (m ^ salt) || salt; hides m partially
    def ev(lam, x):
        half = len(x) // 2
        m, salt = x[:half], x[half:]
        masked = "".join("01"[int(a) ^ int(b)] for a, b in zip(m, salt))
        return masked + salt

    return FunctionFamily("xor-mask", lambda lam: 2 * lam, ev,
                          length_generic=True)


def drop_salt_family():
    # com reveals the message and drops the salt entirely: perfectly
    # binding, zero hiding
    def ev(lam, x):
        return x[: len(x) // 2]

    return FunctionFamily("drop-salt", lambda lam: 2 * lam, ev,
                          length_generic=True)


def base_scheme(accept_threshold=1, rounds=1):
    """Public-coin base: accept iff every prover bit equals its coin."""
    verifier1 = coin_party("V1", lambda lam: (1,) * rounds)
    prover = Party("P", lambda lam: 1, lambda lam: rounds,
                   lambda lam, i: 1,
                   lambda lam, seed, msgs, sent: msgs[-1])

    def verifier2(lam, tau):
        msgs = tau.messages()
        return all(msgs[2 * i + 1] == msgs[2 * i] for i in range(rounds))

    return IVPoQ("echo-base", prover, verifier1, verifier2,
                 lambda lam: F(1), lambda lam: F(1, 2), public_coin=True)


class TestCommitmentAudit:
    def test_identity_reveals_but_binds(self):
        scheme = toy_extractable_commitment(identity_family(),
                                            lambda lam: 1, lambda lam: 1)
        report = commitment_audit(scheme, 1)
        assert report.quantities["hiding_distance"] == 1
        assert report.quantities["binding_failures"] == 0
        assert report.quantities["extractor_value_disagreements"] == 0
        assert report.all_passed

    def test_xorfold_binding_fails_with_witness(self):
        scheme = toy_extractable_commitment(xorfold_family(),
                                            lambda lam: 1, lambda lam: 1)
        report = commitment_audit(scheme, 1)
        assert report.quantities["binding_failures"] > 0
        assert any("binding failure witness" in n for n in report.notes)

    def test_xor_mask_perfect_hiding(self):
        # masked = m ^ salt with a uniform salt: the masked half is uniform
        # regardless of m, but the exposed salt breaks hiding completely
        scheme = toy_extractable_commitment(xor_mask_family(),
                                            lambda lam: 1, lambda lam: 1)
        report = commitment_audit(scheme, 1)
        assert report.quantities["binding_failures"] == 0
        assert report.quantities["hiding_distance"] == 1

    def test_drop_salt_measured_hiding_zero(self):
        # dropping the salt makes com = m: binding perfect, hiding zero?
        # no - com reveals m, so hiding distance is 1; the perfectly hiding
        # toy is the one that drops the *message*
        def ev(lam, x):
            return x[len(x) // 2:]

        f = FunctionFamily("drop-msg", lambda lam: 2 * lam, ev,
                           length_generic=True)
        scheme = toy_extractable_commitment(f, lambda lam: 1, lambda lam: 1)
        report = commitment_audit(scheme, 1)
        assert report.quantities["hiding_distance"] == 0
        assert report.quantities["binding_failures"] > 0


class TestCompiler:
    def scheme(self):
        return toy_extractable_commitment(identity_family(),
                                          lambda lam: 1, lambda lam: 1)

    def test_requires_public_coin(self):
        base = base_scheme()
        private = replace(base, public_coin=False)
        with pytest.raises(NotPublicCoin):
            compile_zk(private, self.scheme())

    def test_always_accept_base_compiles_to_one(self):
        base = replace(base_scheme(), verifier2=lambda lam, tau: True)
        zk = compile_zk(base, self.scheme())
        assert ivpoq_accept_prob(zk.compiled, zk.compiled.prover, 1) == 1

    def test_completeness_accounting_perfect_binding(self):
        base = base_scheme()
        zk = compile_zk(base, self.scheme())
        report = compiler_completeness_report(zk, 1)
        assert report.all_passed
        assert report.quantities["binding_failure_acceptance_mass"] == 0
        # the echoing prover always matches its coin, so both games accept
        assert report.quantities["compiled_acceptance"] == \
            report.quantities["base_acceptance"] == 1

    def test_completeness_accounting_with_binding_failures(self):
        base = replace(base_scheme(), verifier2=lambda lam, tau: True)
        broken = toy_extractable_commitment(xorfold_family(),
                                            lambda lam: 1, lambda lam: 1)
        zk = compile_zk(base, broken)
        report = compiler_completeness_report(zk, 1)
        assert report.all_passed
        # xorfold commitments always collide, so every accepting run breaks
        assert report.quantities["binding_failure_acceptance_mass"] == 1
        assert report.quantities["compiled_acceptance"] == 0

    def test_compiled_verifier_messages_are_coins(self):
        zk = compile_zk(base_scheme(rounds=2), self.scheme())
        assert zk.compiled.public_coin
        assert zk.compiled.verifier1.n_messages(1) == 2


class TestSimulator:
    def test_perfectly_hiding_commit_gives_sd_zero(self):
        def ev(lam, x):
            return x[len(x) // 2:]

        f = FunctionFamily("drop-msg", lambda lam: 2 * lam, ev,
                           length_generic=True)
        scheme = toy_extractable_commitment(f, lambda lam: 1, lambda lam: 1)
        zk = compile_zk(base_scheme(), scheme)
        report = simulator_report(zk, 1)
        assert report.quantities["view_distance"] == 0
        assert report.all_passed

    def test_revealing_commit_bounded_by_rounds(self):
        zk = compile_zk(base_scheme(rounds=2),
                        toy_extractable_commitment(identity_family(),
                                                   lambda lam: 1,
                                                   lambda lam: 1))
        report = simulator_report(zk, 1)
        assert report.all_passed
        assert 0 < report.quantities["view_distance"] <= 2

    def test_zero_round_base_empty_view(self):
        base = IVPoQ("empty", silent_party("P"), silent_party("V1"),
                     lambda lam, tau: True, lambda lam: F(1),
                     lambda lam: F(1), public_coin=True)
        zk = compile_zk(base, self_scheme())
        report = simulator_report(zk, 1)
        assert report.quantities["view_distance"] == 0


def self_scheme():
    return toy_extractable_commitment(identity_family(), lambda lam: 1,
                                      lambda lam: 1)


class TestHybridProvers:
    def test_honest_prover_identical_across_hybrids(self):
        zk = compile_zk(base_scheme(rounds=2), self_scheme())
        report = hybrid_provers_audit(zk, zk.compiled.prover, 1)
        assert report.all_passed
        accs = [report.quantities[f"hybrid_{j}_acceptance"] for j in range(3)]
        assert len(set(accs)) == 1
        assert all(report.quantities[f"extract_value_discrepancy_{j}"] == 0
                   for j in (1, 2))

    def test_junk_committing_cheater_rejected_throughout(self):
        zk = compile_zk(base_scheme(), self_scheme())
        # commits to garbage that never opens: identity commitments always
        # open, so instead send a fixed commitment to the wrong bit
        cheater = Party("junk", lambda lam: 1,
                        zk.compiled.prover.n_messages,
                        zk.compiled.prover.msg_len,
                        lambda lam, seed, msgs, sent: "10")
        report = hybrid_provers_audit(zk, cheater, 1)
        assert report.all_passed
        # the committed bit matches the coin half the time
        assert report.quantities["hybrid_0_acceptance"] == F(1, 2)

    def test_faulty_extractor_measured(self):
        scheme = self_scheme()
        faulty = replace(scheme, extract=lambda lam, com: "1")
        zk = compile_zk(base_scheme(), faulty)
        report = hybrid_provers_audit(zk, zk.compiled.prover, 1)
        # the honest prover echoes the coin, so extraction disagrees exactly
        # when the coin was 0
        assert report.quantities["extract_value_discrepancy_1"] == F(1, 2)
        assert report.all_passed  # the inequality allows for the discrepancy

    def test_endpoint_identity_exact(self):
        zk = compile_zk(base_scheme(rounds=2), self_scheme())
        cheater = Party("zeros", lambda lam: 1,
                        zk.compiled.prover.n_messages,
                        zk.compiled.prover.msg_len,
                        lambda lam, seed, msgs, sent: "00")
        report = hybrid_provers_audit(zk, cheater, 1)
        assert report.quantities["hybrid_0_acceptance"] == \
            report.quantities["compiled_acceptance"]


class TestTranscriptPremise:
    def test_honest_wrapper_sd_zero(self):
        from poqlab.reductions import transcript_sampler

        base = base_scheme()
        sim = transcript_sampler(base.verifier1, base.prover, id="wrap")
        report = hvszk_transcript_premise_check(base, sim, 1)
        assert report.quantities["transcript_sd"] == 0

    def test_point_mass_simulator(self):
        from poqlab.core import SeededSampler
        from poqlab.protocols import encode_messages

        base = base_scheme()
        fixed = encode_messages(("0", "0"))
        sim = SeededSampler("point", lambda lam: 1, lambda lam: len(fixed),
                            lambda lam, seed: fixed)
        report = hvszk_transcript_premise_check(base, sim, 1)
        # the honest distribution puts mass 1/2 on that transcript
        assert report.quantities["transcript_sd"] == F(1, 2)
