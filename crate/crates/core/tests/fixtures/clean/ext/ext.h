#ifndef CLEAN_EXT_H
#define CLEAN_EXT_H

class E1
{
};

enum E2
{
};

enum E3
{
};

class U1
{
};

class U2
{
};

enum U3
{
};

class U4;

#endif
