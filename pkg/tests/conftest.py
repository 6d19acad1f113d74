import os

os.environ["NFL_ENV"] = "test"
