#  Copyright 2023 The HuggingFace Team. All rights reserved.
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from invkit.configuration import (
    AutoVerificationConfig,
    DecompositionConfig,
    InvkitConfig,
    VerificationConfig,
    WitnessSearchConfig,
)
from invkit.scalars import EXTENSION, PrimeField
from invkit.utils import CONFIG_NAME, DEFAULT_RESOURCE_CAP, RESOURCE_CAP_ENV, resolve_resource_cap
from invkit.verification import LemmaVerifier
from invkit.version import __version__


class InvkitConfigTest(unittest.TestCase):
    def test_save_and_load(self):
        config = AutoVerificationConfig.fast("F5")
        with tempfile.TemporaryDirectory() as tmpdirname:
            InvkitConfig(config).save_pretrained(tmpdirname)
            path = Path(tmpdirname) / CONFIG_NAME
            self.assertTrue(path.is_file())
            with open(path) as f:
                self.assertEqual(json.load(f)["invkit_version"], __version__)
            loaded = InvkitConfig.from_pretrained(tmpdirname).verification_config()
            self.assertEqual(InvkitConfig.from_pretrained(path).verification_config(), loaded)
        self.assertEqual(loaded, config)
        self.assertEqual(loaded.field_descriptor(), PrimeField(5))
        self.assertEqual(loaded.search.budget, 2000)
        self.assertEqual(loaded.lemma_schedule.max_word_length, 1)

    def test_save_to_a_file_path(self):
        with tempfile.NamedTemporaryFile() as f:
            with self.assertRaises(ValueError):
                InvkitConfig().save_pretrained(f.name)

    def test_missing_file(self):
        with tempfile.TemporaryDirectory() as tmpdirname:
            with self.assertRaises(FileNotFoundError):
                InvkitConfig.from_pretrained(tmpdirname)

    def test_unknown_options(self):
        config = InvkitConfig({"field": "Q", "shortcuts": True})
        with self.assertRaises(ValueError):
            config.verification_config()

    def test_verifier_from_pretrained(self):
        with tempfile.TemporaryDirectory() as tmpdirname:
            InvkitConfig(AutoVerificationConfig.default("QiS2")).save_pretrained(tmpdirname)
            verifier = LemmaVerifier.from_pretrained(tmpdirname)
        self.assertEqual(verifier.field, EXTENSION)
        self.assertEqual(verifier.config.primes, (3, 5, 7))


class ParameterValidationTest(unittest.TestCase):
    def test_decomposition(self):
        with self.assertRaises(ValueError):
            DecompositionConfig(max_degree=0)
        with self.assertRaises(ValueError):
            DecompositionConfig(initial_points=8, margin=8)
        with self.assertRaises(ValueError):
            DecompositionConfig(initial_points=128, max_points=64)

    def test_search(self):
        self.assertEqual(WitnessSearchConfig(entries=[0, 1]).entries, (0, 1))
        with self.assertRaises(ValueError):
            WitnessSearchConfig(budget=-1)
        with self.assertRaises(ValueError):
            WitnessSearchConfig(strategy="greedy")

    def test_nested_dicts(self):
        config = VerificationConfig(decomposition={"seed": 7, "exact": False}, search={"budget": 10}, primes=[3])
        self.assertEqual(config.decomposition.seed, 7)
        self.assertFalse(config.decomposition.exact)
        self.assertTrue(VerificationConfig().decomposition.exact)
        self.assertEqual(config.search.budget, 10)
        self.assertEqual(config.primes, (3,))

    def test_full_suite_shows_progress(self):
        self.assertTrue(AutoVerificationConfig.full_suite().decomposition.show_progress)


class ResourceCapTest(unittest.TestCase):
    def test_default(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(resolve_resource_cap(), DEFAULT_RESOURCE_CAP)
            self.assertEqual(DecompositionConfig().cap, DEFAULT_RESOURCE_CAP)

    def test_environment(self):
        with mock.patch.dict(os.environ, {RESOURCE_CAP_ENV: "5000"}):
            self.assertEqual(resolve_resource_cap(), 5000)
            self.assertEqual(resolve_resource_cap(20), 20)
        with mock.patch.dict(os.environ, {RESOURCE_CAP_ENV: "many"}):
            with self.assertRaises(ValueError):
                resolve_resource_cap()

    def test_invalid_value(self):
        with self.assertRaises(ValueError):
            resolve_resource_cap(0)
