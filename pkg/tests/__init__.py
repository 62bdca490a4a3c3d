"""Test suite for SMT-BLEU assignment"""
