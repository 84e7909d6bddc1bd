from armicontrib.photoacoustic.tests import photoacousticTestingApp


def pytest_sessionstart(session):
    import armi

    if not armi.isConfigured():
        armi.configure(photoacousticTestingApp.PhotoacousticTestingApp())
