import setuptools

setuptools.setup(
    # see setup.cfg
)
