"""Unit tests for fieldcover.""" 