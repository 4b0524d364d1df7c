#ifndef TEST_OVERLOAD_H
#define TEST_OVERLOAD_H

/**
 * \brief This class is used to illustrate problems that can arise with
 * overloading
 *
 * At this stage mainly static
 * (\ref Overload::staticness) and
 * const (\ref Overload::constness or
 * \ref Overload::nonconstness)
 * overloading are reported as problematic.
 *
 * \note The documentation is also used for illustrating the Doxygen to Sphinx
 * conversions
 *
 * \todo Any problem concerning method overloading should be added in this class
 */
struct Overload
{
    Overload();

    void staticness(const unsigned int value);
    static void staticness(const Overload& overload, const unsigned int value);

    void constness();
    void constness() const;

    void nonconstness() const;
    void nonconstness();
};

#endif
